use crate::error::{Error, Result};
use crate::jet::{Complex, Primitive};

use super::{Expr, MAX_EXPONENT};

/// Maximum nesting of parentheses, calls and unary minus.
pub const MAX_DEPTH: usize = 256;

pub fn parse(text: &str) -> Result<Expr> {
    parse_bytes(text.as_bytes())
}

/// Parses raw bytes. Any non-ASCII byte is a syntax error.
pub fn parse_bytes(text: &[u8]) -> Result<Expr> {
    let mut p = Parser {
        src: text,
        pos: 0,
        depth: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: &str) -> Error {
        Error::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.error("expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            self.enter()?;
            let inner = self.unary()?;
            self.leave();
            Ok(Expr::neg(inner))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            Ok(Expr::pow(base, k))
        } else {
            Ok(base)
        }
    }

    /// Signed integer exponent; a trailing `^` chain folds right to left.
    fn exponent(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error("expected integer exponent"));
        }
        if matches!(self.peek(), Some(b'.')) || matches!(self.peek(), Some(b) if is_ident_char(b)) {
            return Err(self.error("exponent must be an integer"));
        }
        let magnitude = parse_small_int(&self.src[digits_start..self.pos])
            .ok_or_else(|| self.error_at(start, "exponent out of range"))?;
        let mut k = if negative { -magnitude } else { magnitude };
        if self.eat(b'^') {
            self.enter()?;
            let outer = self.exponent()?;
            self.leave();
            k = fold_power(k, outer)
                .ok_or_else(|| self.error_at(start, "exponent out of range"))?;
        }
        if k.unsigned_abs() > MAX_EXPONENT as u32 {
            return Err(self.error_at(start, "exponent out of range"));
        }
        Ok(k)
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                self.enter()?;
                let inner = self.expr()?;
                self.leave();
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b'0'..=b'9' | b'.') => self.number(),
            Some(b) if is_ident_start(b) => {
                while matches!(self.peek(), Some(b) if is_ident_char(b)) {
                    self.pos += 1;
                }
                // identifier bytes are ASCII
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                self.identifier(name, start)
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn identifier(&mut self, name: &str, start: usize) -> Result<Expr> {
        match name {
            "z" => return Ok(Expr::Variable),
            "zc" => return Ok(Expr::ConjVariable),
            "i" => return Ok(Expr::ImaginaryUnit),
            _ => {}
        }
        let g = Primitive::from_name(name).ok_or_else(|| Error::UnknownIdentifier {
            offset: start,
            name: name.to_string(),
        })?;
        let arity = |found| Error::Arity {
            offset: start,
            name: name.to_string(),
            expected: 1,
            found,
        };
        if !self.eat(b'(') {
            return Err(arity(0));
        }
        if self.eat(b')') {
            return Err(arity(0));
        }
        self.enter()?;
        let arg = self.expr()?;
        let mut found = 1;
        while self.eat(b',') {
            self.expr()?;
            found += 1;
        }
        self.leave();
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        if found != 1 {
            return Err(arity(found));
        }
        Ok(Expr::call(g, arg))
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut digits = 0;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
            digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.error_at(start, "malformed number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(b'0'..=b'9')) {
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let x: f64 = text
            .parse()
            .map_err(|_| self.error_at(start, "malformed number"))?;
        if !x.is_finite() {
            return Err(self.error_at(start, "number out of range"));
        }
        let imaginary = self.peek() == Some(b'i')
            && !matches!(self.src.get(self.pos + 1), Some(&b) if is_ident_char(b));
        if imaginary {
            self.pos += 1;
            Ok(Expr::Constant(Complex::new(0.0, x)))
        } else {
            Ok(Expr::Constant(Complex::new(x, 0.0)))
        }
    }
}

fn parse_small_int(digits: &[u8]) -> Option<i32> {
    let mut acc: i32 = 0;
    for &d in digits {
        acc = acc.checked_mul(10)?.checked_add(i32::from(d - b'0'))?;
        if acc > 1 << 20 {
            return None;
        }
    }
    Some(acc)
}

/// `base^exp` for integer exponents, only where the result stays integral.
fn fold_power(base: i32, exp: i32) -> Option<i32> {
    if exp < 0 {
        return match base {
            1 => Some(1),
            -1 => Some(if exp % 2 == 0 { 1 } else { -1 }),
            _ => None,
        };
    }
    let mut acc: i32 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc.unsigned_abs() > MAX_EXPONENT as u32 {
            return None;
        }
    }
    Some(acc)
}
