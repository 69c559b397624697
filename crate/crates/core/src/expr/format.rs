use crate::jet::Complex;

use super::Expr;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

/// Renders `e` with the fewest parentheses the grammar needs.
///
/// `parse(format(e)) == e` holds for every tree the parser can produce.
/// Constants outside that set (negative reals, mixed complex values) are
/// printed as a parenthesized sum that evaluates to the same number.
pub fn format(e: &Expr) -> String {
    let mut out = String::new();
    write(e, &mut out);
    out
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Pow(..) => POW,
        _ => ATOM,
    }
}

fn write_child(e: &Expr, min: u8, out: &mut String) {
    if precedence(e) < min {
        out.push('(');
        write(e, out);
        out.push(')');
    } else {
        write(e, out);
    }
}

fn write(e: &Expr, out: &mut String) {
    match e {
        Expr::Variable => out.push('z'),
        Expr::ConjVariable => out.push_str("zc"),
        Expr::ImaginaryUnit => out.push('i'),
        Expr::Constant(k) => write_constant(*k, out),
        Expr::Add(a, b) => binary(a, " + ", b, ADD, out),
        Expr::Sub(a, b) => binary(a, " - ", b, ADD, out),
        Expr::Mul(a, b) => binary(a, "*", b, MUL, out),
        Expr::Div(a, b) => binary(a, "/", b, MUL, out),
        Expr::Neg(a) => {
            out.push('-');
            write_child(a, NEG, out);
        }
        Expr::Pow(a, k) => {
            write_child(a, ATOM, out);
            out.push('^');
            out.push_str(&k.to_string());
        }
        Expr::Call(g, a) => {
            out.push_str(g.name());
            out.push('(');
            write(a, out);
            out.push(')');
        }
    }
}

fn binary(a: &Expr, op: &str, b: &Expr, level: u8, out: &mut String) {
    write_child(a, level, out);
    out.push_str(op);
    write_child(b, level + 1, out);
}

fn is_plus_zero(x: f64) -> bool {
    x == 0.0 && x.is_sign_positive()
}

fn write_constant(k: Complex, out: &mut String) {
    let real = is_plus_zero(k.im) && k.re.is_sign_positive();
    let imaginary = is_plus_zero(k.re) && k.im.is_sign_positive() && k.im != 0.0;
    if real {
        out.push_str(&k.re.to_string());
    } else if imaginary {
        out.push_str(&k.im.to_string());
        out.push('i');
    } else {
        // not produced by the parser; keep the value, not the shape
        out.push('(');
        out.push_str(&k.re.to_string());
        if k.im.is_sign_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&k.im.abs().to_string());
        out.push_str("i)");
    }
}
