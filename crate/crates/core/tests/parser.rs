mod common;

use proptest::prelude::*;

use common::arb_expr;
use wirtinger::expr::{parse_bytes, MAX_DEPTH};
use wirtinger::{format, parse, parse_complex, Complex, Error};

fn offset(text: &str) -> usize {
    match parse(text).unwrap_err() {
        Error::Syntax { offset, .. }
        | Error::UnknownIdentifier { offset, .. }
        | Error::Arity { offset, .. } => offset,
        other => panic!("{text}: unexpected {other}"),
    }
}

#[test]
fn error_offsets() {
    assert_eq!(offset(""), 0);
    assert_eq!(offset("z +"), 3);
    assert_eq!(offset("(z"), 2);
    assert_eq!(offset("z)"), 1);
    assert_eq!(offset("2*w"), 2);
    assert_eq!(offset("exp z"), 0);
    assert_eq!(offset("1 + sin()"), 4);
    assert_eq!(offset("z^1.5"), 3);
}

#[test]
fn error_kinds() {
    assert!(matches!(
        parse("foo(z)"),
        Err(Error::UnknownIdentifier { .. })
    ));
    assert!(matches!(
        parse("exp(z, z)"),
        Err(Error::Arity { found: 2, .. })
    ));
    assert!(matches!(parse("z^65"), Err(Error::Syntax { .. })));
    assert!(parse("z^64").is_ok());
    assert!(parse("z^2^6").is_ok());
    assert!(parse("z^2^7").is_err());
}

#[test]
fn nesting_limit() {
    let ok = format!(
        "{}z{}",
        "(".repeat(MAX_DEPTH - 1),
        ")".repeat(MAX_DEPTH - 1)
    );
    assert!(parse(&ok).is_ok());
    let deep = format!(
        "{}z{}",
        "(".repeat(MAX_DEPTH + 1),
        ")".repeat(MAX_DEPTH + 1)
    );
    assert!(parse(&deep).is_err());
    assert!(parse(&"-".repeat(100_000)).is_err());
    assert!(parse(&"exp(".repeat(10_000)).is_err());
}

#[test]
fn complex_literals() {
    assert_eq!(parse_complex("1+2i").unwrap(), Complex::new(1.0, 2.0));
    assert_eq!(parse_complex("-3i").unwrap(), Complex::new(0.0, -3.0));
    assert_eq!(parse_complex("2.5").unwrap(), Complex::new(2.5, 0.0));
    assert_eq!(
        parse_complex("-1e-3 - i").unwrap(),
        Complex::new(-1e-3, -1.0)
    );
    assert!(parse_complex("z").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = parse_bytes(&bytes);
    }

    #[test]
    fn whitespace_is_insignificant(e in arb_expr()) {
        let text = format(&e);
        // identifiers and numbers must stay glued, so only pad around operators
        let spaced = text.replace('+', " + ").replace('*', " * ").replace('(', "( ").replace(')', " )");
        prop_assert_eq!(parse(&spaced).unwrap(), e);
    }
}
