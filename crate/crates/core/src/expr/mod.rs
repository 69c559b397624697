//! Expressions in `z` and `z*`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" ["-"] INT)*        right-associative, |exponent| <= 64
//! primary := NUMBER | NUMBER "i" | "i" | "z" | "zc" | NAME "(" expr ")" | "(" expr ")"
//! ```
//!
//! `i` is the imaginary unit, `z` the variable, and `zc` or `conj(z)` its
//! conjugate. `NAME` is one of `exp log sin cos sqrt conj re im abs abs2 arg`.

mod format;
mod parser;

pub use format::format;
pub use parser::{parse, parse_bytes, MAX_DEPTH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{is_finite, Complex, JetCarrier, Primitive, WirtingerJet, DEFAULT_POLE_FLOOR, I};
use crate::second::SecondOrderJet;

/// Largest admissible `|k|` in `e^k`.
pub const MAX_EXPONENT: i32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Variable,
    ConjVariable,
    Constant(Complex),
    ImaginaryUnit,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Primitive, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(k: Complex) -> Expr {
        Expr::Constant(k)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }

    pub fn call(g: Primitive, a: Expr) -> Expr {
        Expr::Call(g, Box::new(a))
    }

    /// True if the expression mentions `z` or `z*`.
    pub fn has_variable(&self) -> bool {
        match self {
            Expr::Variable | Expr::ConjVariable => true,
            Expr::Constant(_) | Expr::ImaginaryUnit => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_variable() || b.has_variable()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.has_variable(),
        }
    }

    /// True if any node injects conjugate dependence (`zc` or a
    /// non-holomorphic primitive).
    pub fn has_conjugation(&self) -> bool {
        match self {
            Expr::ConjVariable => true,
            Expr::Variable | Expr::Constant(_) | Expr::ImaginaryUnit => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_conjugation() || b.has_conjugation()
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.has_conjugation(),
            Expr::Call(g, a) => !g.is_holomorphic() || a.has_conjugation(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Variable | Expr::ConjVariable | Expr::Constant(_) | Expr::ImaginaryUnit => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format(self))
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

fn eval_node<J: JetCarrier>(e: &Expr, c: Complex, floor: f64) -> Result<J> {
    Ok(match e {
        Expr::Variable => J::variable(c),
        Expr::ConjVariable => J::variable(c).conj(),
        Expr::Constant(k) => J::constant(*k),
        Expr::ImaginaryUnit => J::constant(I),
        Expr::Add(a, b) => eval_node::<J>(a, c, floor)?.add(&eval_node(b, c, floor)?),
        Expr::Sub(a, b) => eval_node::<J>(a, c, floor)?.sub(&eval_node(b, c, floor)?),
        Expr::Mul(a, b) => eval_node::<J>(a, c, floor)?.mul(&eval_node(b, c, floor)?),
        Expr::Div(a, b) => eval_node::<J>(a, c, floor)?.div(&eval_node(b, c, floor)?, floor)?,
        Expr::Neg(a) => eval_node::<J>(a, c, floor)?.neg(),
        Expr::Pow(a, k) => eval_node::<J>(a, c, floor)?.apply(Primitive::PowInt(*k), floor)?,
        Expr::Call(g, a) => eval_node::<J>(a, c, floor)?.apply(*g, floor)?,
    })
}

/// Evaluates `e` at `c` into any carrier, with the default pole floor.
pub fn eval<J: JetCarrier>(e: &Expr, c: Complex) -> Result<J> {
    eval_with_floor(e, c, DEFAULT_POLE_FLOOR)
}

pub fn eval_with_floor<J: JetCarrier>(e: &Expr, c: Complex, pole_floor: f64) -> Result<J> {
    if !is_finite(c) {
        return Err(Error::NonFinite("evaluation point"));
    }
    let out: J = eval_node(e, c, pole_floor)?;
    if !out.is_finite() {
        return Err(Error::NonFinite("result"));
    }
    Ok(out)
}

/// Result of [`eval_jet`] at a requested order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Value(Complex),
    First(WirtingerJet),
    Second(SecondOrderJet),
}

impl Evaluation {
    pub fn value(&self) -> Complex {
        match self {
            Evaluation::Value(v) => *v,
            Evaluation::First(j) => j.value,
            Evaluation::Second(j) => j.value,
        }
    }
}

/// Order-dispatched evaluation: 0 gives the value, 1 a [`WirtingerJet`],
/// 2 a [`SecondOrderJet`].
pub fn eval_jet(e: &Expr, c: Complex, order: u8) -> Result<Evaluation> {
    match order {
        0 => eval(e, c).map(Evaluation::Value),
        1 => eval(e, c).map(Evaluation::First),
        2 => eval(e, c).map(Evaluation::Second),
        k => Err(Error::InvalidConfig(format!(
            "order must be 0, 1 or 2, got {k}"
        ))),
    }
}

/// Parses a constant complex literal such as `1+2i`, `-3i` or `0.5`.
///
/// Accepts any variable-free expression and folds it.
pub fn parse_complex(text: &str) -> Result<Complex> {
    let e = parse(text)?;
    if e.has_variable() {
        return Err(Error::Syntax {
            offset: 0,
            message: "complex literal must not mention z".into(),
        });
    }
    eval(&e, Complex::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn conj_literal_first_order() {
        let j: WirtingerJet = eval(&parse("conj(z)").unwrap(), c(2.0, 1.0)).unwrap();
        assert_eq!(j, WirtingerJet::new(c(2.0, -1.0), c(0.0, 0.0), c(1.0, 0.0)));
        let j2: WirtingerJet = eval(&parse("zc").unwrap(), c(2.0, 1.0)).unwrap();
        assert_eq!(j, j2);
    }

    #[test]
    fn chain_example_numbers() {
        let j: WirtingerJet = eval(&parse("(z^2+conj(z))^3").unwrap(), c(1.0, 0.0)).unwrap();
        assert_eq!(j.value, c(8.0, 0.0));
        assert_eq!(j.dz, c(24.0, 0.0));
        assert_eq!(j.dzc, c(12.0, 0.0));
    }

    #[test]
    fn pole_at_origin() {
        let e = parse("1/z").unwrap();
        for order in 0..=2 {
            assert!(matches!(
                eval_jet(&e, c(0.0, 0.0), order),
                Err(Error::Pole { .. })
            ));
        }
        assert!(matches!(
            eval_jet(&e, c(1.0, 0.0), 3),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn order_consistency_of_value_slot() {
        let e = parse("exp(z)*conj(z)^2/(z - 3i) + arg(z)*log(z)").unwrap();
        let at = c(0.7, 1.3);
        let v = eval_jet(&e, at, 0).unwrap().value();
        for order in 1..=2 {
            let w = eval_jet(&e, at, order).unwrap().value();
            assert_eq!(v.re.to_bits(), w.re.to_bits());
            assert_eq!(v.im.to_bits(), w.im.to_bits());
        }
    }

    #[test]
    fn non_finite_is_an_error() {
        let e = parse("exp(z)").unwrap();
        assert_eq!(
            eval::<Complex>(&e, c(1000.0, 0.0)),
            Err(Error::NonFinite("result"))
        );
        assert_eq!(
            eval::<Complex>(&e, c(f64::NAN, 0.0)),
            Err(Error::NonFinite("evaluation point"))
        );
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("-3i").unwrap(), c(0.0, -3.0));
        assert_eq!(parse_complex("2.5").unwrap(), c(2.5, 0.0));
        assert_eq!(parse_complex("1+1i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert!(parse_complex("z").is_err());
        assert!(parse_complex("1+").is_err());
    }

    #[test]
    fn conjugation_detection() {
        assert!(!parse("exp(z)*z^2/(z+1)").unwrap().has_conjugation());
        assert!(parse("z*abs2(z)").unwrap().has_conjugation());
        assert!(parse("zc").unwrap().has_conjugation());
    }
}
