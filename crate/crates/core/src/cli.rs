//! Command implementations for the `wirt` binary.
//!
//! Every command produces a [`CliReport`] (JSON, `"schema": 1`) and an exit
//! code:
//!
//! | code | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0    | success (`check`: AD and FD agree; `minimize`: converged)      |
//! | 1    | `check`: residual above `--tol`; `minimize`: iteration budget  |
//! | 2    | syntax, unknown identifier, arity, bad flag or data file       |
//! | 3    | pole, domain error or unsupported primitive at the point       |
//! | 4    | `minimize`: diverged or cost not real                          |

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::expr::{eval, parse, parse_complex, Expr};
use crate::hilbert::HVec;
use crate::jet::{Complex, WirtingerJet};
use crate::optimize::{
    build_least_squares, steepest_descent_scalar, DescentConfig, StepMode, Termination,
};
use crate::oracle::{
    classify, expr_fn, fd_wirtinger, near_branch_cut, Verdict, DEFAULT_STEP, DEFAULT_TOL,
};
use crate::second::{propagate_second_order, SecondOrderJet};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "wirt",
    version,
    about = "Wirtinger derivatives, holomorphy checks and descent"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON (default); `--json false` prints a short text summary.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set,
          num_args = 0..=1, default_missing_value = "true")]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value and W/CW derivatives (plus the Hessian block with --order 2).
    Diff(DiffArgs),
    /// Alias for `diff --order 2`.
    Hessian(PointArgs),
    /// Compare AD against central differences and classify holomorphy.
    Check(CheckArgs),
    /// Cauchy-Riemann classification by central differences.
    Classify(CheckArgs),
    /// Steepest descent on a real cost or a least-squares data file.
    Minimize(MinimizeArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Expression in z, e.g. "z^3 - i*z + conj(z)^2".
    pub expr: String,
    /// Evaluation point, e.g. 1+2i or -3i.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub at: String,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1)]
    pub order: u8,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = DEFAULT_STEP, allow_negative_numbers = true)]
    pub step: f64,
    #[arg(long, default_value_t = DEFAULT_TOL, allow_negative_numbers = true)]
    pub tol: f64,
    /// Additional random points in [-2, 2]² (check only).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Real-valued cost in z. Omit when --data is given.
    pub expr: Option<String>,
    /// Least-squares data file: {"X": [[[re,im],...],...], "d": [[re,im],...]}.
    #[arg(long, conflicts_with = "expr")]
    pub data: Option<PathBuf>,
    /// Starting point for an expression cost.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Armijo backtracking (shrink 0.5, c 1e-4) starting from --mu.
    #[arg(long)]
    pub backtrack: bool,
    /// Fit d ≈ ⟨x, a⟩ + ⟨x*, b⟩ instead of d ≈ ⟨x, f⟩.
    #[arg(long)]
    pub widely_linear: bool,
    /// Write the iteration trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Least-squares data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsqData {
    #[serde(rename = "X")]
    pub x: Vec<Vec<Complex>>,
    pub d: Vec<Complex>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<DescentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widely_linear: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub dzz: Complex,
    pub dzzc: Complex,
    pub dzcz: Complex,
    pub dzczc: Complex,
    pub mixed_symmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub w: Complex,
    pub cw: Complex,
    pub step: f64,
}

/// Relative AD-vs-FD residuals and the Cauchy–Riemann residuals
/// (`cr = |CW|`, `conj_cr = |W|`). With `--samples` these are maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub dz: f64,
    pub dzc: f64,
    pub cr: f64,
    pub conj_cr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentSummary {
    pub termination: Termination,
    pub iterations: usize,
    pub initial_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_cost: Option<f64>,
    pub final_grad_norm: Option<f64>,
    pub final_point: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

/// The machine-readable result of one command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CliReport {
    pub schema: u32,
    pub command: String,
    pub input: InputEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dz: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dzc: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian: Option<HessianReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

impl CliReport {
    fn new(command: &str, input: InputEcho) -> Self {
        CliReport {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            ..CliReport::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable rendering for `--json false`.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let fmt = |c: &Complex| {
            format!(
                "{} {} {}i",
                c.re + 0.0,
                if c.im < 0.0 { '-' } else { '+' },
                c.im.abs()
            )
        };
        if let Some(e) = &self.error {
            out.push(format!("error ({}): {}", e.kind, e.message));
        }
        for (name, v) in [("value", &self.value), ("dz", &self.dz), ("dzc", &self.dzc)] {
            if let Some(v) = v {
                out.push(format!("{name:<6} = {}", fmt(v)));
            }
        }
        if let Some(h) = &self.hessian {
            out.push(format!("dzz    = {}", fmt(&h.dzz)));
            out.push(format!("dzzc   = {}", fmt(&h.dzzc)));
            out.push(format!("dzcz   = {}", fmt(&h.dzcz)));
            out.push(format!("dzczc  = {}", fmt(&h.dzczc)));
        }
        if let Some(r) = &self.residuals {
            out.push(format!(
                "residual dz {:e}, dzc {:e} over {} point(s)",
                r.dz, r.dzc, r.points
            ));
        }
        if let Some(v) = &self.classification {
            out.push(format!("classification: {v:?}"));
        }
        if let Some(d) = &self.descent {
            out.push(format!(
                "{:?} after {} iteration(s)",
                d.termination, d.iterations
            ));
            let pts: Vec<String> = d.final_point.iter().map(fmt).collect();
            out.push(format!("final point: [{}]", pts.join(", ")));
        }
        out.join("\n")
    }
}

pub struct Outcome {
    pub report: CliReport,
    pub exit_code: i32,
}

fn error_kind(e: &Error) -> (&'static str, Option<usize>) {
    match e {
        Error::Syntax { offset, .. } => ("syntax", Some(*offset)),
        Error::UnknownIdentifier { offset, .. } => ("unknown_identifier", Some(*offset)),
        Error::Arity { offset, .. } => ("arity", Some(*offset)),
        Error::Pole { .. } => ("pole", None),
        Error::Domain(_) => ("domain", None),
        Error::UnsupportedPrimitive(_) => ("unsupported_primitive", None),
        Error::NonFinite(_) => ("non_finite", None),
        Error::StepTooSmall(_) => ("step_too_small", None),
        Error::DimensionMismatch { .. } => ("dimension_mismatch", None),
        Error::EmptyData => ("empty_data", None),
        Error::NonRealCost { .. } => ("non_real_cost", None),
        Error::SingularHessian => ("singular_hessian", None),
        Error::InvalidConfig(_) => ("invalid_config", None),
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_evaluation_error() {
        3
    } else if matches!(e, Error::NonRealCost { .. }) {
        4
    } else {
        2
    }
}

fn fail(mut report: CliReport, e: &Error) -> Outcome {
    let (kind, offset) = error_kind(e);
    report.error = Some(ErrorReport {
        kind: kind.to_string(),
        message: e.to_string(),
        offset,
    });
    Outcome {
        report,
        exit_code: exit_code_for(e),
    }
}

fn fail_usage(mut report: CliReport, kind: &str, message: String) -> Outcome {
    report.error = Some(ErrorReport {
        kind: kind.to_string(),
        message,
        offset: None,
    });
    Outcome {
        report,
        exit_code: 2,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Diff(a) => cmd_diff(&a.point.expr, &a.point.at, a.order),
        Command::Hessian(a) => cmd_diff(&a.expr, &a.at, 2),
        Command::Check(a) => cmd_check(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Minimize(a) => cmd_minimize(a),
    }
}

fn parse_inputs(text: &str, at: &str) -> Result<(Expr, Complex), Error> {
    let e = parse(text)?;
    let at = parse_complex(at)?;
    Ok((e, at))
}

pub fn cmd_diff(text: &str, at_text: &str, order: u8) -> Outcome {
    let mut report = CliReport::new(
        "diff",
        InputEcho {
            expr: Some(text.to_string()),
            order: Some(order),
            ..InputEcho::default()
        },
    );
    let (e, at) = match parse_inputs(text, at_text) {
        Ok(v) => v,
        Err(err) => return fail(report, &err),
    };
    report.input.at = Some(at);
    match order {
        1 => match eval::<WirtingerJet>(&e, at) {
            Ok(j) => {
                report.value = Some(j.value);
                report.dz = Some(j.dz);
                report.dzc = Some(j.dzc);
            }
            Err(err) => return fail(report, &err),
        },
        2 => match propagate_second_order(&e, at) {
            Ok(j) => fill_second(&mut report, &j),
            Err(err) => return fail(report, &err),
        },
        k => {
            return fail(
                report,
                &Error::InvalidConfig(format!("order must be 1 or 2, got {k}")),
            )
        }
    }
    Outcome {
        report,
        exit_code: 0,
    }
}

fn fill_second(report: &mut CliReport, j: &SecondOrderJet) {
    report.value = Some(j.value);
    report.dz = Some(j.dz);
    report.dzc = Some(j.dzc);
    report.hessian = Some(HessianReport {
        dzz: j.dzz,
        dzzc: j.dzzc,
        dzcz: j.dzcz,
        dzczc: j.dzczc,
        mixed_symmetric: j.has_symmetric_mixed_partials(),
    });
}

fn check_echo(a: &CheckArgs, with_samples: bool) -> InputEcho {
    InputEcho {
        expr: Some(a.point.expr.clone()),
        step: Some(a.step),
        tol: Some(a.tol),
        samples: with_samples.then_some(a.samples),
        seed: with_samples.then_some(a.seed),
        ..InputEcho::default()
    }
}

fn relative(ad: Complex, fd: Complex) -> f64 {
    (ad - fd).norm() / (1.0 + ad.norm())
}

pub fn cmd_check(a: &CheckArgs) -> Outcome {
    let mut report = CliReport::new("check", check_echo(a, true));
    let (e, at) = match parse_inputs(&a.point.expr, &a.point.at) {
        Ok(v) => v,
        Err(err) => return fail(report, &err),
    };
    report.input.at = Some(at);

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut points = vec![at];
    while points.len() < a.samples + 1 {
        let p = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if !near_branch_cut(p) {
            points.push(p);
        }
    }

    let mut residuals = Residuals {
        dz: 0.0,
        dzc: 0.0,
        cr: 0.0,
        conj_cr: 0.0,
        points: points.len(),
    };
    for (k, p) in points.iter().enumerate() {
        let jet: WirtingerJet = match eval(&e, *p) {
            Ok(j) => j,
            Err(err) => return fail(report, &err),
        };
        let (w, cw) = match fd_wirtinger(expr_fn(&e), *p, a.step) {
            Ok(v) => v,
            Err(err) => return fail(report, &err),
        };
        if k == 0 {
            report.value = Some(jet.value);
            report.dz = Some(jet.dz);
            report.dzc = Some(jet.dzc);
            report.oracle = Some(OracleReport {
                w,
                cw,
                step: a.step,
            });
            report.classification = Some(
                crate::oracle::HolomorphyClass::from_residuals(cw.norm(), w.norm(), a.tol).verdict,
            );
            residuals.cr = cw.norm();
            residuals.conj_cr = w.norm();
        }
        residuals.dz = residuals.dz.max(relative(jet.dz, w));
        residuals.dzc = residuals.dzc.max(relative(jet.dzc, cw));
    }
    let ok = residuals.dz < a.tol && residuals.dzc < a.tol;
    report.residuals = Some(residuals);
    Outcome {
        report,
        exit_code: if ok { 0 } else { 1 },
    }
}

pub fn cmd_classify(a: &CheckArgs) -> Outcome {
    let mut report = CliReport::new("classify", check_echo(a, false));
    let (e, at) = match parse_inputs(&a.point.expr, &a.point.at) {
        Ok(v) => v,
        Err(err) => return fail(report, &err),
    };
    report.input.at = Some(at);
    match classify(expr_fn(&e), at, a.step, a.tol) {
        Ok(k) => {
            report.classification = Some(k.verdict);
            report.residuals = Some(Residuals {
                dz: 0.0,
                dzc: 0.0,
                cr: k.cr_residual,
                conj_cr: k.conj_cr_residual,
                points: 1,
            });
            Outcome {
                report,
                exit_code: 0,
            }
        }
        Err(err) => fail(report, &err),
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn summarize<P: Clone>(
    trace: &crate::optimize::DescentTrace<P>,
    to_coords: impl Fn(&P) -> Vec<Complex>,
) -> DescentSummary {
    DescentSummary {
        termination: trace.termination,
        iterations: trace.iterations(),
        initial_cost: trace.costs[0],
        final_cost: finite(trace.final_cost()),
        final_grad_norm: finite(trace.final_grad_norm()),
        final_point: to_coords(trace.final_point()),
    }
}

fn termination_code(t: Termination) -> i32 {
    match t {
        Termination::Converged => 0,
        Termination::MaxIter => 1,
        Termination::Diverged => 4,
    }
}

pub fn cmd_minimize(a: &MinimizeArgs) -> Outcome {
    let cfg = DescentConfig {
        mu: a.mu,
        tol: a.tol,
        max_iter: a.max_iter,
        step_mode: if a.backtrack {
            StepMode::DEFAULT_BACKTRACKING
        } else {
            StepMode::Fixed
        },
    };
    let mut report = CliReport::new(
        "minimize",
        InputEcho {
            expr: a.expr.clone(),
            data: a.data.as_ref().map(|p| p.display().to_string()),
            seed: a.seed,
            config: Some(cfg),
            widely_linear: a.data.as_ref().map(|_| a.widely_linear),
            ..InputEcho::default()
        },
    );
    if let Err(err) = cfg.validate() {
        return fail(report, &err);
    }

    let (summary, lines) = if let Some(path) = &a.data {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(err) => return fail_usage(report, "io", format!("{}: {err}", path.display())),
        };
        let data: LsqData = match serde_json::from_str(&text) {
            Ok(d) => d,
            Err(err) => return fail_usage(report, "data", format!("{}: {err}", path.display())),
        };
        let rows: Result<Vec<HVec>, Error> = data.x.into_iter().map(HVec::new).collect();
        let problem = rows.and_then(|x| build_least_squares(&x, &data.d, a.widely_linear));
        let problem = match problem {
            Ok(p) => p,
            Err(err) => return fail(report, &err),
        };
        let start = HVec::zeros(problem.param_dim());
        match problem.minimize(&start, &cfg) {
            Ok(trace) => (
                summarize(&trace, |f| f.coords().to_vec()),
                trace.to_json_lines(),
            ),
            Err(err) => return fail(report, &err),
        }
    } else {
        let Some(text) = &a.expr else {
            return fail_usage(
                report,
                "usage",
                "either an expression or --data is required".into(),
            );
        };
        let (e, z0) = match parse_inputs(text, &a.from) {
            Ok(v) => v,
            Err(err) => return fail(report, &err),
        };
        report.input.at = Some(z0);
        match steepest_descent_scalar(&e, z0, &cfg) {
            Ok(trace) => (summarize(&trace, |z| vec![*z]), trace.to_json_lines()),
            Err(err) => return fail(report, &err),
        }
    };

    if let Some(path) = &a.trace {
        if let Err(err) = std::fs::write(path, lines) {
            return fail_usage(report, "io", format!("{}: {err}", path.display()));
        }
    }
    let exit_code = termination_code(summary.termination);
    report.descent = Some(summary);
    Outcome { report, exit_code }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let mut full = vec!["wirt"];
        full.extend_from_slice(args);
        run(&Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn flag_parsing() {
        let cli = Cli::try_parse_from(["wirt", "diff", "z^2", "--at", "-3i"]).unwrap();
        assert!(cli.json);
        let cli = Cli::try_parse_from(["wirt", "--json", "false", "classify", "z"]).unwrap();
        assert!(!cli.json);
        assert!(Cli::try_parse_from(["wirt", "minimize", "z", "--data", "x.json"]).is_err());
    }

    #[test]
    fn diff_reports() {
        let out = run_args(&["diff", "z^2", "--at", "1+1i"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.dz, Some(Complex::new(2.0, 2.0)));
        assert_eq!(out.report.dzc, Some(Complex::new(0.0, 0.0)));

        let out = run_args(&["hessian", "z*conj(z)", "--at", "2"]);
        let h = out.report.hessian.unwrap();
        assert_eq!(h.dzzc, Complex::new(1.0, 0.0));
        assert!(h.mixed_symmetric);

        let out = run_args(&["diff", "z +"]);
        assert_eq!(out.exit_code, 2);
        assert_eq!(out.report.error.unwrap().offset, Some(3));
    }

    #[test]
    fn check_with_samples() {
        let out = run_args(&[
            "check",
            "exp(z)*conj(z) + arg(z)",
            "--at",
            "1+1i",
            "--samples",
            "10",
            "--seed",
            "7",
        ]);
        assert_eq!(out.exit_code, 0, "{}", out.report.to_json());
        assert_eq!(out.report.residuals.unwrap().points, 11);
        assert_eq!(out.report.classification, Some(Verdict::Neither));
    }

    #[test]
    fn report_round_trips() {
        let out = run_args(&["hessian", "abs2(z - 1)", "--at", "0.5-2i"]);
        let text = out.report.to_json();
        let back: CliReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out.report);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], 1);
    }

    #[test]
    fn text_rendering() {
        let out = run_args(&["diff", "z^2", "--at", "1+1i"]);
        let text = out.report.to_text();
        assert!(text.contains("dz     = 2 + 2i"), "{text}");
    }
}
