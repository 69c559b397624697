use clap::Parser;
use env_logger::Env;

use wirtinger::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(Env::new().filter("WIRT_LOG")).init();
    let cli = Cli::parse();
    let outcome = run(&cli);
    if cli.json {
        println!("{}", outcome.report.to_json());
    } else if outcome.report.error.is_some() {
        eprintln!("{}", outcome.report.to_text());
    } else {
        println!("{}", outcome.report.to_text());
    }
    std::process::exit(outcome.exit_code);
}
