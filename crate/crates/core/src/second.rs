//! Second-order Wirtinger jets and the complex Hessian block.
//!
//! A [`SecondOrderJet`] is a flat seven-slot carrier: the value, the two
//! first-order partials and four second-order partials. The mixed slots are
//! stored separately:
//!
//! * `dzzc` is `∂/∂z*` applied to `∂f/∂z`,
//! * `dzcz` is `∂/∂z` applied to `∂f/∂z*`.
//!
//! They agree for C² functions, which makes their difference a free
//! smoothness diagnostic. First-order slots are produced by the exact same
//! code as [`WirtingerJet`], so they match it bit for bit.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval, Expr};
use crate::jet::{check_pole, is_finite, Complex, JetCarrier, Primitive, WirtingerJet, ZERO};

/// Relative tolerance for `|dzzc - dzcz|` on C² inputs.
pub const MIXED_PARTIAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderJet {
    pub value: Complex,
    pub dz: Complex,
    pub dzc: Complex,
    pub dzz: Complex,
    pub dzzc: Complex,
    pub dzcz: Complex,
    pub dzczc: Complex,
}

/// Second partials `(g_ww, g_ww*, g_w*w*)` of a primitive. The mixed entry
/// is shared since every supported primitive is C² off its excluded set.
fn second_partials(g: Primitive, w: Complex) -> Result<[Complex; 3]> {
    let i = Complex::new(0.0, 1.0);
    Ok(match g {
        Primitive::Exp => [w.exp(), ZERO, ZERO],
        Primitive::Log => [-(w * w).inv(), ZERO, ZERO],
        Primitive::Sin => [-w.sin(), ZERO, ZERO],
        Primitive::Cos => [-w.cos(), ZERO, ZERO],
        Primitive::Sqrt => [-(w * w.sqrt() * 4.0).inv(), ZERO, ZERO],
        Primitive::PowInt(k) if k == 0 || k == 1 => [ZERO, ZERO, ZERO],
        Primitive::PowInt(k) => [w.powi(k - 2) * f64::from(k) * f64::from(k - 1), ZERO, ZERO],
        Primitive::Conj | Primitive::Re | Primitive::Im => [ZERO, ZERO, ZERO],
        Primitive::Abs2 => [ZERO, Complex::new(1.0, 0.0), ZERO],
        Primitive::Arg => {
            let wc = w.conj();
            [i / (w * w * 2.0), ZERO, -i / (wc * wc * 2.0)]
        }
        Primitive::Abs => return Err(Error::UnsupportedPrimitive("abs")),
    })
}

impl SecondOrderJet {
    pub fn variable(c: Complex) -> Self {
        Self::from_first(WirtingerJet::variable(c))
    }

    pub fn constant(k: Complex) -> Self {
        Self::from_first(WirtingerJet::constant(k))
    }

    /// Lifts a first-order jet with all second-order slots zero.
    pub fn from_first(j: WirtingerJet) -> Self {
        SecondOrderJet {
            value: j.value,
            dz: j.dz,
            dzc: j.dzc,
            dzz: ZERO,
            dzzc: ZERO,
            dzcz: ZERO,
            dzczc: ZERO,
        }
    }

    pub fn first_order(&self) -> WirtingerJet {
        WirtingerJet::new(self.value, self.dz, self.dzc)
    }

    fn with_first(j: WirtingerJet, second: [Complex; 4]) -> Self {
        SecondOrderJet {
            value: j.value,
            dz: j.dz,
            dzc: j.dzc,
            dzz: second[0],
            dzzc: second[1],
            dzcz: second[2],
            dzczc: second[3],
        }
    }

    fn second(&self) -> [Complex; 4] {
        [self.dzz, self.dzzc, self.dzcz, self.dzczc]
    }

    pub fn linear_combine(alpha: Complex, a: &Self, beta: Complex, b: &Self) -> Self {
        let first = WirtingerJet::linear_combine(alpha, &a.first_order(), beta, &b.first_order());
        let (sa, sb) = (a.second(), b.second());
        Self::with_first(first, std::array::from_fn(|k| alpha * sa[k] + beta * sb[k]))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let first = self.first_order().mul(&rhs.first_order());
        Self::with_first(first, product_second(self, rhs))
    }

    pub fn conj(&self) -> Self {
        SecondOrderJet {
            value: self.value.conj(),
            dz: self.dzc.conj(),
            dzc: self.dz.conj(),
            dzz: self.dzczc.conj(),
            dzzc: self.dzcz.conj(),
            dzcz: self.dzzc.conj(),
            dzczc: self.dzz.conj(),
        }
    }

    pub fn div_with_floor(&self, rhs: &Self, pole_floor: f64) -> Result<Self> {
        let first = self
            .first_order()
            .div_with_floor(&rhs.first_order(), pole_floor)?;
        let w = rhs.value;
        let recip_first = rhs.first_order().recip_with_floor(pole_floor)?;
        let recip_grad = [-(w * w).inv(), ZERO];
        let recip_hess = [(w * w * w).inv() * 2.0, ZERO, ZERO];
        let recip = Self::with_first(recip_first, chain_second(rhs, recip_grad, recip_hess));
        Ok(Self::with_first(first, product_second(self, &recip)))
    }

    /// Chain rule through `g`, second order. Writing the inner jet in the
    /// pair of formal variables `(w, w*)`:
    ///
    /// `f_ab = Σ_jk g_jk · (∂_a w_j)(∂_b w_k) + Σ_j g_j · ∂_b ∂_a w_j`
    ///
    /// where `w_1 = w*` and `∂(w*)/∂z = (∂w/∂z*)*` and so on.
    pub fn apply_with_floor(&self, g: Primitive, pole_floor: f64) -> Result<Self> {
        let h = second_partials(g, self.value)?;
        let first = self.first_order().apply_with_floor(g, pole_floor)?;
        let p = g.partials(self.value, pole_floor)?;
        Ok(Self::with_first(
            first,
            chain_second(self, [p.dw, p.dwc], h),
        ))
    }

    /// `f(c) + (f_z, f_z*)·(h, h*)ᵀ + ½ (h, h*) H (h, h*)ᵀ`.
    pub fn taylor_model(&self, h: Complex) -> Complex {
        let hc = h.conj();
        let quad = self.dzz * h * h + (self.dzzc + self.dzcz) * h * hc + self.dzczc * hc * hc;
        self.value + self.dz * h + self.dzc * hc + quad * 0.5
    }

    /// `|dzzc - dzcz|`, the mixed-partial asymmetry.
    pub fn mixed_asymmetry(&self) -> f64 {
        (self.dzzc - self.dzcz).norm()
    }

    pub fn has_symmetric_mixed_partials(&self) -> bool {
        self.mixed_asymmetry() <= MIXED_PARTIAL_TOL * (1.0 + self.dzzc.norm())
    }

    pub fn hessian(&self) -> HessianBlock {
        HessianBlock {
            grad: [self.dz, self.dzc],
            matrix: [[self.dzz, self.dzzc], [self.dzcz, self.dzczc]],
        }
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.value)
            && self
                .second()
                .iter()
                .chain([self.dz, self.dzc].iter())
                .all(|c| is_finite(*c))
    }
}

fn product_second(a: &SecondOrderJet, b: &SecondOrderJet) -> [Complex; 4] {
    let (x, y) = (a.value, b.value);
    [
        a.dzz * y + a.dz * b.dz * 2.0 + x * b.dzz,
        a.dzzc * y + a.dz * b.dzc + a.dzc * b.dz + x * b.dzzc,
        a.dzcz * y + a.dzc * b.dz + a.dz * b.dzc + x * b.dzcz,
        a.dzczc * y + a.dzc * b.dzc * 2.0 + x * b.dzczc,
    ]
}

fn chain_second(inner: &SecondOrderJet, grad: [Complex; 2], hess: [Complex; 3]) -> [Complex; 4] {
    let a = inner;
    // derivatives of (w, w*) with respect to z and z*
    let p = [a.dz, a.dzc.conj()];
    let q = [a.dzc, a.dz.conj()];
    let w_zz = [a.dzz, a.dzczc.conj()];
    let w_zzc = [a.dzzc, a.dzcz.conj()];
    let w_zcz = [a.dzcz, a.dzzc.conj()];
    let w_zczc = [a.dzczc, a.dzz.conj()];
    let h = [[hess[0], hess[1]], [hess[1], hess[2]]];
    let quad = |u: [Complex; 2], v: [Complex; 2]| -> Complex {
        let mut acc = ZERO;
        for j in 0..2 {
            for k in 0..2 {
                acc += h[j][k] * u[j] * v[k];
            }
        }
        acc
    };
    let lin = |v: [Complex; 2]| grad[0] * v[0] + grad[1] * v[1];
    [
        quad(p, p) + lin(w_zz),
        quad(p, q) + lin(w_zzc),
        quad(q, p) + lin(w_zcz),
        quad(q, q) + lin(w_zczc),
    ]
}

impl JetCarrier for SecondOrderJet {
    fn constant(k: Complex) -> Self {
        SecondOrderJet::constant(k)
    }
    fn variable(c: Complex) -> Self {
        SecondOrderJet::variable(c)
    }
    fn value(&self) -> Complex {
        self.value
    }
    fn add(&self, rhs: &Self) -> Self {
        let first = self.first_order() + rhs.first_order();
        let (a, b) = (self.second(), rhs.second());
        Self::with_first(first, std::array::from_fn(|k| a[k] + b[k]))
    }
    fn sub(&self, rhs: &Self) -> Self {
        let first = self.first_order() - rhs.first_order();
        let (a, b) = (self.second(), rhs.second());
        Self::with_first(first, std::array::from_fn(|k| a[k] - b[k]))
    }
    fn neg(&self) -> Self {
        let s = self.second();
        Self::with_first(-self.first_order(), std::array::from_fn(|k| -s[k]))
    }
    fn mul(&self, rhs: &Self) -> Self {
        SecondOrderJet::mul(self, rhs)
    }
    fn div(&self, rhs: &Self, pole_floor: f64) -> Result<Self> {
        check_pole(rhs.value, pole_floor)?;
        self.div_with_floor(rhs, pole_floor)
    }
    fn conj(&self) -> Self {
        SecondOrderJet::conj(self)
    }
    fn apply(&self, g: Primitive, pole_floor: f64) -> Result<Self> {
        self.apply_with_floor(g, pole_floor)
    }
    fn is_finite(&self) -> bool {
        SecondOrderJet::is_finite(self)
    }
}

/// The 2×2 matrix of second Wirtinger partials together with the gradient
/// pair, `[[f_zz, f_zz*], [f_z*z, f_z*z*]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianBlock {
    pub grad: [Complex; 2],
    pub matrix: [[Complex; 2]; 2],
}

impl HessianBlock {
    /// Checks the structure every real-valued function must have:
    /// `(f_z)* = f_z*`, real mixed partials and `f_zz = (f_z*z*)*`.
    pub fn is_real_structured(&self, tol: f64) -> bool {
        let [[zz, zzc], [zcz, zczc]] = self.matrix;
        let scale = 1.0 + zz.norm().max(zczc.norm()).max(zzc.norm());
        (self.grad[0].conj() - self.grad[1]).norm() <= tol * (1.0 + self.grad[0].norm())
            && zzc.im.abs() <= tol * scale
            && zcz.im.abs() <= tol * scale
            && (zz - zczc.conj()).norm() <= tol * scale
    }

    pub fn determinant(&self) -> Complex {
        let [[a, b], [c, d]] = self.matrix;
        a * d - b * c
    }
}

/// Evaluates `expr` at `c` as a second-order jet. `abs` is rejected with
/// [`Error::UnsupportedPrimitive`]. Mixed-partial asymmetry above
/// [`MIXED_PARTIAL_TOL`] is logged, not treated as a failure.
pub fn propagate_second_order(expr: &Expr, c: Complex) -> Result<SecondOrderJet> {
    let jet: SecondOrderJet = eval(expr, c)?;
    if !jet.has_symmetric_mixed_partials() {
        warn!(
            "mixed partials disagree at {c}: |dzzc - dzcz| = {:e}",
            jet.mixed_asymmetry()
        );
    }
    Ok(jet)
}

/// Quadratic model of `f(c + h)` built from a jet computed at `c`.
pub fn second_order_taylor(jet: &SecondOrderJet, h: Complex) -> Complex {
    jet.taylor_model(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn jet(text: &str, at: Complex) -> SecondOrderJet {
        propagate_second_order(&parse(text).unwrap(), at).unwrap()
    }

    #[test]
    fn quadratic_slots() {
        for at in [c(0.0, 0.0), c(1.0, -2.0), c(-0.3, 0.7)] {
            let sq = jet("z^2", at);
            assert_eq!(
                [sq.dzz, sq.dzzc, sq.dzcz, sq.dzczc],
                [c(2.0, 0.0), ZERO, ZERO, ZERO]
            );

            let m = jet("z*conj(z)", at);
            assert_eq!(m.dzz, ZERO);
            assert_eq!(m.dzczc, ZERO);
            assert!((m.dzzc - c(1.0, 0.0)).norm() == 0.0);
            assert!((m.dzcz - c(1.0, 0.0)).norm() == 0.0);

            let cq = jet("conj(z)^2", at);
            assert_eq!([cq.dzz, cq.dzzc, cq.dzcz], [ZERO, ZERO, ZERO]);
            assert_eq!(cq.dzczc, c(2.0, 0.0));
        }
    }

    #[test]
    fn taylor_model_is_exact_on_quadratics() {
        let sq = jet("z^2", c(0.0, 0.0));
        assert_eq!(sq.taylor_model(c(1.0, 1.0)), c(0.0, 2.0));
        let m = jet("z*conj(z)", c(0.0, 0.0));
        for h in [c(0.3, -1.1), c(2.0, 5.0)] {
            assert!((m.taylor_model(h) - c(h.norm_sqr(), 0.0)).norm() <= 1e-14);
        }
    }

    #[test]
    fn taylor_model_of_exp_has_cubic_error() {
        let e = jet("exp(z)", c(0.0, 0.0));
        let h = c(0.01, 0.0);
        let err = (e.taylor_model(h) - h.exp()).norm();
        assert!(err <= 2e-7, "{err}");
    }

    #[test]
    fn abs_is_unsupported() {
        let err = propagate_second_order(&parse("abs(z)").unwrap(), c(1.0, 1.0)).unwrap_err();
        assert_eq!(err, Error::UnsupportedPrimitive("abs"));
    }

    #[test]
    fn first_order_slice_matches_first_order_jet() {
        let at = c(0.6, -0.4);
        for text in [
            "exp(z)*conj(z)^2/(z+3)",
            "arg(z)*abs2(z-1)",
            "sqrt(z+2)^-2",
            "log(z)*re(z)",
        ] {
            let e = parse(text).unwrap();
            let first: WirtingerJet = eval(&e, at).unwrap();
            let second: SecondOrderJet = eval(&e, at).unwrap();
            assert_eq!(second.first_order(), first, "{text}");
        }
    }

    #[test]
    fn real_valued_block_structure() {
        let at = c(0.9, 0.35);
        for text in [
            "abs2(z^2 - 1)",
            "re(z)^3 + im(z)*re(z)",
            "(z - 1)*conj(z - 1)*exp(re(z))",
        ] {
            let j = jet(text, at);
            assert!(j.hessian().is_real_structured(1e-10), "{text}: {j:?}");
        }
    }
}
