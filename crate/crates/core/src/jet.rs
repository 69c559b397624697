//! First-order Wirtinger jets.
//!
//! A [`WirtingerJet`] carries `f(c)` together with the pair
//! `(∂f/∂z, ∂f/∂z*)` at the same point. Arithmetic on jets applies the
//! linearity, product, reciprocal, quotient and chain rules, so the
//! derivative of any composition falls out of evaluating it on a seeded
//! variable.
//!
//! Jets do not remember their base point. Combining jets computed at
//! different points is a caller error and is not detected.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Magnitudes below this are treated as a pole by `recip`/`div` and as the
/// excluded point by `log`, `sqrt`, `abs` and `arg`.
pub const DEFAULT_POLE_FLOOR: f64 = 1e-300;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);
pub(crate) const I: Complex = Complex::new(0.0, 1.0);

pub(crate) fn is_finite(c: Complex) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// Elementary functions available inside expressions.
///
/// Holomorphic primitives have a vanishing `∂g/∂z*`. The non-holomorphic
/// ones (`conj`, `re`, `im`, `abs`, `abs2`, `arg`) carry both partials.
/// `log`, `sqrt` and `arg` use the principal branch with the cut on the
/// negative real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Primitive {
    Exp,
    Log,
    Sin,
    Cos,
    PowInt(i32),
    Sqrt,
    Conj,
    Re,
    Im,
    Abs,
    Abs2,
    Arg,
}

/// Partials `(∂g/∂w, ∂g/∂w*)` of a primitive at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub dw: Complex,
    pub dwc: Complex,
}

impl Primitive {
    /// Callable primitives, i.e. everything except `PowInt`, which is
    /// written with `^`.
    pub const CALLABLE: [Primitive; 11] = [
        Primitive::Exp,
        Primitive::Log,
        Primitive::Sin,
        Primitive::Cos,
        Primitive::Sqrt,
        Primitive::Conj,
        Primitive::Re,
        Primitive::Im,
        Primitive::Abs,
        Primitive::Abs2,
        Primitive::Arg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Log => "log",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::PowInt(_) => "pow_int",
            Primitive::Sqrt => "sqrt",
            Primitive::Conj => "conj",
            Primitive::Re => "re",
            Primitive::Im => "im",
            Primitive::Abs => "abs",
            Primitive::Abs2 => "abs2",
            Primitive::Arg => "arg",
        }
    }

    pub fn from_name(name: &str) -> Option<Primitive> {
        Primitive::CALLABLE
            .iter()
            .copied()
            .find(|p| p.name() == name)
    }

    pub fn is_holomorphic(self) -> bool {
        matches!(
            self,
            Primitive::Exp
                | Primitive::Log
                | Primitive::Sin
                | Primitive::Cos
                | Primitive::PowInt(_)
                | Primitive::Sqrt
        )
    }

    fn check_domain(self, w: Complex, pole_floor: f64) -> Result<()> {
        let excluded = matches!(
            self,
            Primitive::Log | Primitive::Sqrt | Primitive::Abs | Primitive::Arg
        );
        if excluded && w.norm() < pole_floor {
            return Err(Error::Domain(format!(
                "{} is not differentiable at 0",
                self.name()
            )));
        }
        if let Primitive::PowInt(k) = self {
            if k < 0 && w.norm() < pole_floor {
                return Err(Error::Pole {
                    magnitude: w.norm(),
                });
            }
        }
        Ok(())
    }

    /// `g(w)`. Shared by every carrier so value slots agree bitwise across
    /// differentiation orders.
    pub fn value(self, w: Complex, pole_floor: f64) -> Result<Complex> {
        self.check_domain(w, pole_floor)?;
        Ok(match self {
            Primitive::Exp => w.exp(),
            Primitive::Log => w.ln(),
            Primitive::Sin => w.sin(),
            Primitive::Cos => w.cos(),
            Primitive::PowInt(k) => w.powi(k),
            Primitive::Sqrt => w.sqrt(),
            Primitive::Conj => w.conj(),
            Primitive::Re => Complex::new(w.re, 0.0),
            Primitive::Im => Complex::new(w.im, 0.0),
            Primitive::Abs => Complex::new(w.norm(), 0.0),
            Primitive::Abs2 => Complex::new(w.norm_sqr(), 0.0),
            Primitive::Arg => Complex::new(w.arg(), 0.0),
        })
    }

    /// First-order partial table.
    pub fn partials(self, w: Complex, pole_floor: f64) -> Result<Partials> {
        self.check_domain(w, pole_floor)?;
        let half = Complex::new(0.5, 0.0);
        let (dw, dwc) = match self {
            Primitive::Exp => (w.exp(), ZERO),
            Primitive::Log => (w.inv(), ZERO),
            Primitive::Sin => (w.cos(), ZERO),
            Primitive::Cos => (-w.sin(), ZERO),
            Primitive::PowInt(0) => (ZERO, ZERO),
            Primitive::PowInt(k) => (w.powi(k - 1) * f64::from(k), ZERO),
            Primitive::Sqrt => ((w.sqrt() * 2.0).inv(), ZERO),
            Primitive::Conj => (ZERO, ONE),
            Primitive::Re => (half, half),
            Primitive::Im => (Complex::new(0.0, -0.5), Complex::new(0.0, 0.5)),
            Primitive::Abs2 => (w.conj(), w),
            Primitive::Abs => {
                let two_r = 2.0 * w.norm();
                (w.conj() / two_r, w / two_r)
            }
            Primitive::Arg => (-I / (w * 2.0), I / (w.conj() * 2.0)),
        };
        Ok(Partials { dw, dwc })
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::PowInt(k) => write!(f, "pow_int({k})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Value plus `(∂f/∂z, ∂f/∂z*)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WirtingerJet {
    pub value: Complex,
    pub dz: Complex,
    pub dzc: Complex,
}

impl WirtingerJet {
    pub const fn new(value: Complex, dz: Complex, dzc: Complex) -> Self {
        WirtingerJet { value, dz, dzc }
    }

    /// The independent variable `z` seeded at `c`: `(c, 1, 0)`.
    pub fn variable(c: Complex) -> Self {
        debug_assert!(is_finite(c), "seed point must be finite");
        WirtingerJet::new(c, ONE, ZERO)
    }

    pub fn constant(k: Complex) -> Self {
        debug_assert!(is_finite(k), "constant must be finite");
        WirtingerJet::new(k, ZERO, ZERO)
    }

    /// `α·a + β·b`.
    pub fn linear_combine(alpha: Complex, a: &Self, beta: Complex, b: &Self) -> Self {
        WirtingerJet {
            value: alpha * a.value + beta * b.value,
            dz: alpha * a.dz + beta * b.dz,
            dzc: alpha * a.dzc + beta * b.dzc,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        WirtingerJet {
            value: self.value * rhs.value,
            dz: self.dz * rhs.value + self.value * rhs.dz,
            dzc: self.dzc * rhs.value + self.value * rhs.dzc,
        }
    }

    /// `f*`: `∂f*/∂z = (∂f/∂z*)*` and `∂f*/∂z* = (∂f/∂z)*`.
    pub fn conj(&self) -> Self {
        WirtingerJet {
            value: self.value.conj(),
            dz: self.dzc.conj(),
            dzc: self.dz.conj(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        self.recip_with_floor(DEFAULT_POLE_FLOOR)
    }

    pub fn recip_with_floor(&self, pole_floor: f64) -> Result<Self> {
        check_pole(self.value, pole_floor)?;
        let sq = self.value * self.value;
        Ok(WirtingerJet {
            value: self.value.inv(),
            dz: -self.dz / sq,
            dzc: -self.dzc / sq,
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.div_with_floor(rhs, DEFAULT_POLE_FLOOR)
    }

    pub fn div_with_floor(&self, rhs: &Self, pole_floor: f64) -> Result<Self> {
        check_pole(rhs.value, pole_floor)?;
        let sq = rhs.value * rhs.value;
        Ok(WirtingerJet {
            value: self.value / rhs.value,
            dz: (self.dz * rhs.value - self.value * rhs.dz) / sq,
            dzc: (self.dzc * rhs.value - self.value * rhs.dzc) / sq,
        })
    }

    pub fn apply(&self, g: Primitive) -> Result<Self> {
        self.apply_with_floor(g, DEFAULT_POLE_FLOOR)
    }

    /// Chain rule with outer primitive `g`:
    /// `∂(g∘f)/∂z = g_w·f_z + g_w*·(f_z*)*`, and symmetrically for `z*`.
    pub fn apply_with_floor(&self, g: Primitive, pole_floor: f64) -> Result<Self> {
        let value = g.value(self.value, pole_floor)?;
        let p = g.partials(self.value, pole_floor)?;
        Ok(WirtingerJet {
            value,
            dz: p.dw * self.dz + p.dwc * self.dzc.conj(),
            dzc: p.dw * self.dzc + p.dwc * self.dz.conj(),
        })
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.value) && is_finite(self.dz) && is_finite(self.dzc)
    }
}

pub(crate) fn check_pole(value: Complex, pole_floor: f64) -> Result<()> {
    let magnitude = value.norm();
    if magnitude < pole_floor {
        Err(Error::Pole { magnitude })
    } else {
        Ok(())
    }
}

impl Add for WirtingerJet {
    type Output = WirtingerJet;

    fn add(self, rhs: Self) -> Self {
        WirtingerJet::new(self.value + rhs.value, self.dz + rhs.dz, self.dzc + rhs.dzc)
    }
}

impl Sub for WirtingerJet {
    type Output = WirtingerJet;

    fn sub(self, rhs: Self) -> Self {
        WirtingerJet::new(self.value - rhs.value, self.dz - rhs.dz, self.dzc - rhs.dzc)
    }
}

impl Neg for WirtingerJet {
    type Output = WirtingerJet;

    fn neg(self) -> Self {
        WirtingerJet::new(-self.value, -self.dz, -self.dzc)
    }
}

/// Anything an [`Expr`](crate::expr::Expr) can be evaluated into.
///
/// The three built-in carriers are plain [`Complex`] values, first-order
/// [`WirtingerJet`]s and [`SecondOrderJet`](crate::second::SecondOrderJet)s.
/// Implementations must compute the value slot with the same floating-point
/// operations as the `Complex` carrier.
pub trait JetCarrier: Sized + Clone {
    fn constant(k: Complex) -> Self;
    fn variable(c: Complex) -> Self;
    fn value(&self) -> Complex;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self, pole_floor: f64) -> Result<Self>;
    fn conj(&self) -> Self;
    fn apply(&self, g: Primitive, pole_floor: f64) -> Result<Self>;
    fn is_finite(&self) -> bool;
}

impl JetCarrier for Complex {
    fn constant(k: Complex) -> Self {
        k
    }
    fn variable(c: Complex) -> Self {
        c
    }
    fn value(&self) -> Complex {
        *self
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self, pole_floor: f64) -> Result<Self> {
        check_pole(*rhs, pole_floor)?;
        Ok(self / rhs)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn apply(&self, g: Primitive, pole_floor: f64) -> Result<Self> {
        g.value(*self, pole_floor)
    }
    fn is_finite(&self) -> bool {
        is_finite(*self)
    }
}

impl JetCarrier for WirtingerJet {
    fn constant(k: Complex) -> Self {
        WirtingerJet::constant(k)
    }
    fn variable(c: Complex) -> Self {
        WirtingerJet::variable(c)
    }
    fn value(&self) -> Complex {
        self.value
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul(&self, rhs: &Self) -> Self {
        WirtingerJet::mul(self, rhs)
    }
    fn div(&self, rhs: &Self, pole_floor: f64) -> Result<Self> {
        self.div_with_floor(rhs, pole_floor)
    }
    fn conj(&self) -> Self {
        WirtingerJet::conj(self)
    }
    fn apply(&self, g: Primitive, pole_floor: f64) -> Result<Self> {
        self.apply_with_floor(g, pole_floor)
    }
    fn is_finite(&self) -> bool {
        WirtingerJet::is_finite(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn seeds_and_constants() {
        for p in [c(0.0, 0.0), c(1.0, 1.0), c(2.0, -3.0)] {
            assert_eq!(WirtingerJet::variable(p), WirtingerJet::new(p, ONE, ZERO));
        }
        for k in [I, ZERO, c(5.0, 0.0)] {
            assert_eq!(WirtingerJet::constant(k), WirtingerJet::new(k, ZERO, ZERO));
        }
    }

    #[test]
    fn linear_combine_identity() {
        let p = c(0.3, -1.2);
        let seed = WirtingerJet::variable(p);
        let other = WirtingerJet::new(c(9.0, 1.0), c(2.0, 2.0), c(-1.0, 0.5));
        let out = WirtingerJet::linear_combine(ONE, &seed, ZERO, &other);
        assert_eq!(out, seed);
    }

    #[test]
    fn square_at_one_plus_i() {
        let z = WirtingerJet::variable(c(1.0, 1.0));
        let sq = z.mul(&z);
        assert_eq!(sq.value, c(0.0, 2.0));
        assert_eq!(sq.dz, c(2.0, 2.0));
        assert_eq!(sq.dzc, ZERO);
    }

    #[test]
    fn modulus_squared_partials() {
        let p = c(1.5, -0.25);
        let z = WirtingerJet::variable(p);
        let m = z.mul(&z.conj());
        assert_eq!(m.dz, p.conj());
        assert_eq!(m.dzc, p);
    }

    #[test]
    fn scalar_product_matches_linear_combine() {
        let k = c(0.7, -2.0);
        let j = WirtingerJet::new(c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0));
        let a = WirtingerJet::constant(k).mul(&j);
        let b = WirtingerJet::linear_combine(k, &j, ZERO, &j);
        assert_eq!(a, b);
    }

    #[test]
    fn conj_of_seed_and_constant() {
        let p = c(2.0, 1.0);
        assert_eq!(
            WirtingerJet::variable(p).conj(),
            WirtingerJet::new(p.conj(), ZERO, ONE)
        );
        let k = c(-1.0, 4.0);
        let cj = WirtingerJet::constant(k).conj();
        assert_eq!(cj.value, k.conj());
        assert_eq!(cj.dz, ZERO);
        assert_eq!(cj.dzc, ZERO);
        let j = WirtingerJet::new(c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0));
        assert_eq!(j.conj().conj(), j);
    }

    #[test]
    fn reciprocal_rule() {
        let r = WirtingerJet::variable(c(2.0, 0.0)).recip().unwrap();
        assert_eq!(r, WirtingerJet::new(c(0.5, 0.0), c(-0.25, 0.0), ZERO));
        assert_eq!(
            WirtingerJet::constant(ONE).recip().unwrap(),
            WirtingerJet::new(ONE, ZERO, ZERO)
        );
        assert!(matches!(
            WirtingerJet::variable(ZERO).recip(),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn division_rule() {
        let a = WirtingerJet::new(c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0));
        assert_eq!(a.div(&WirtingerJet::constant(ONE)).unwrap(), a);

        let z = WirtingerJet::variable(c(3.0, 1.0));
        let q = z.mul(&z).div(&z).unwrap();
        for (got, want) in [(q.value, z.value), (q.dz, z.dz), (q.dzc, z.dzc)] {
            assert!((got - want).norm() <= 1e-12, "{got} vs {want}");
        }

        let lhs = WirtingerJet::constant(ONE).div(&z).unwrap();
        let rhs = z.recip().unwrap();
        assert!((lhs.value - rhs.value).norm() <= 1e-15);
        assert!((lhs.dz - rhs.dz).norm() <= 1e-15);
        assert_eq!(lhs.dzc, rhs.dzc);
        assert!(matches!(
            a.div(&WirtingerJet::constant(ZERO)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn chain_rule_cube_of_mixed() {
        // (z^2 + z*)^3 at z = 1
        let z = WirtingerJet::variable(ONE);
        let inner = z.mul(&z) + z.conj();
        let out = inner.apply(Primitive::PowInt(3)).unwrap();
        assert_eq!(out.value, c(8.0, 0.0));
        assert_eq!(out.dz, c(24.0, 0.0));
        assert_eq!(out.dzc, c(12.0, 0.0));
    }

    #[test]
    fn exp_and_re_on_seed() {
        let e = WirtingerJet::variable(ZERO).apply(Primitive::Exp).unwrap();
        assert_eq!(e, WirtingerJet::new(ONE, ONE, ZERO));
        let p = c(0.4, -2.5);
        let r = WirtingerJet::variable(p).apply(Primitive::Re).unwrap();
        assert_eq!(r, WirtingerJet::new(c(0.4, 0.0), c(0.5, 0.0), c(0.5, 0.0)));
    }

    #[test]
    fn non_differentiable_points_are_domain_errors() {
        let zero = WirtingerJet::variable(ZERO);
        for g in [
            Primitive::Abs,
            Primitive::Arg,
            Primitive::Log,
            Primitive::Sqrt,
        ] {
            assert!(matches!(zero.apply(g), Err(Error::Domain(_))), "{g}");
        }
        assert!(matches!(
            zero.apply(Primitive::PowInt(-2)),
            Err(Error::Pole { .. })
        ));
        assert_eq!(zero.apply(Primitive::PowInt(0)).unwrap().value, ONE);
    }

    #[test]
    fn holomorphic_table_has_zero_conjugate_partial() {
        let w = c(0.8, 0.6);
        for g in [
            Primitive::Exp,
            Primitive::Log,
            Primitive::Sin,
            Primitive::Cos,
            Primitive::Sqrt,
            Primitive::PowInt(-3),
            Primitive::PowInt(5),
        ] {
            assert!(g.is_holomorphic());
            assert_eq!(g.partials(w, DEFAULT_POLE_FLOOR).unwrap().dwc, ZERO);
        }
    }

    #[test]
    fn names_round_trip() {
        for g in Primitive::CALLABLE {
            assert_eq!(Primitive::from_name(g.name()), Some(g));
        }
        assert_eq!(Primitive::from_name("pow_int"), None);
        assert_eq!(Primitive::from_name("tan"), None);
    }
}
