//! Central-difference Wirtinger derivatives and Cauchy–Riemann
//! classification.
//!
//! Nothing here touches the jet rules: the oracle only ever evaluates the
//! function at probe points, which makes it the arbiter for the AD tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval, Expr};
use crate::jet::Complex;

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOL: f64 = 1e-4;
pub const MIN_STEP: f64 = 1e-12;
/// Probes closer than this to the negative real axis straddle the branch
/// cut of `log`, `sqrt` and `arg`.
pub const BRANCH_CUT_MARGIN: f64 = 1e-3;

pub fn expr_fn(e: &Expr) -> impl Fn(Complex) -> Result<Complex> + '_ {
    move |z| eval::<Complex>(e, z)
}

/// `(∂f/∂x, ∂f/∂y)` by central differences. `f(c)` is evaluated too so
/// that non-differentiable centres surface as errors.
pub fn fd_partials<F>(f: F, c: Complex, step: f64) -> Result<(Complex, Complex)>
where
    F: Fn(Complex) -> Result<Complex>,
{
    if !(step >= MIN_STEP) {
        return Err(Error::StepTooSmall(step));
    }
    // the centre itself must be admissible: abs/arg at 0 have admissible probes
    f(c)?;
    let dx = Complex::new(step, 0.0);
    let dy = Complex::new(0.0, step);
    let fx = (f(c + dx)? - f(c - dx)?) / (2.0 * step);
    let fy = (f(c + dy)? - f(c - dy)?) / (2.0 * step);
    Ok((fx, fy))
}

/// `(W, CW) = (½(f_x − i f_y), ½(f_x + i f_y))`.
pub fn wirtinger_from_partials(fx: Complex, fy: Complex) -> (Complex, Complex) {
    let i = Complex::new(0.0, 1.0);
    ((fx - i * fy) * 0.5, (fx + i * fy) * 0.5)
}

pub fn fd_wirtinger<F>(f: F, c: Complex, step: f64) -> Result<(Complex, Complex)>
where
    F: Fn(Complex) -> Result<Complex>,
{
    let (fx, fy) = fd_partials(f, c, step)?;
    Ok(wirtinger_from_partials(fx, fy))
}

/// True when a probe stencil of radius `step` around `c` could cross the
/// principal branch cut.
pub fn near_branch_cut(c: Complex) -> bool {
    c.re < BRANCH_CUT_MARGIN && c.im.abs() < BRANCH_CUT_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holomorphic,
    ConjugateHolomorphic,
    Both,
    Neither,
}

/// A verdict plus both residuals: `cr_residual = |∂f/∂z*|` (zero iff the
/// Cauchy–Riemann equations hold) and `conj_cr_residual = |∂f/∂z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyClass {
    pub verdict: Verdict,
    pub cr_residual: f64,
    pub conj_cr_residual: f64,
}

impl HolomorphyClass {
    pub fn from_residuals(cr_residual: f64, conj_cr_residual: f64, tol: f64) -> Self {
        let verdict = match (cr_residual < tol, conj_cr_residual < tol) {
            (true, true) => Verdict::Both,
            (true, false) => Verdict::Holomorphic,
            (false, true) => Verdict::ConjugateHolomorphic,
            (false, false) => Verdict::Neither,
        };
        HolomorphyClass {
            verdict,
            cr_residual,
            conj_cr_residual,
        }
    }
}

pub fn classify<F>(f: F, c: Complex, step: f64, tol: f64) -> Result<HolomorphyClass>
where
    F: Fn(Complex) -> Result<Complex>,
{
    let (w, cw) = fd_wirtinger(f, c, step)?;
    Ok(HolomorphyClass::from_residuals(cw.norm(), w.norm(), tol))
}
