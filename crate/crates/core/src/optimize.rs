//! Steepest descent and Newton steps for real-valued costs of complex
//! arguments.
//!
//! For a real cost the conjugate Wirtinger derivative `∂f/∂z*` (or the
//! CW-gradient `∇_{f*}T` on `ℂⁿ`) points in the direction of steepest
//! increase, so the update is `z ← z − μ·∂f/∂z*`. Since the W and CW
//! derivatives of a real function are conjugates of each other, both
//! vanish together at a stationary point.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval, Expr};
use crate::hilbert::{Functional, HVec, InnerKind};
use crate::jet::{Complex, WirtingerJet};
use crate::second::propagate_second_order;

/// Largest `|Im cost|` accepted at the starting point.
pub const START_IMAG_TOL: f64 = 1e-10;
/// Largest `|Im cost|` accepted at later iterates.
pub const DRIFT_IMAG_TOL: f64 = 1e-8;
/// A cost this many times above the initial one stops the run.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Relative singularity threshold for the 2×2 Newton system.
pub const SINGULAR_DET_TOL: f64 = 1e-12;
/// Tolerance for `Δz* ≈ (Δz)*` in the Newton solve.
pub const NEWTON_CONSISTENCY_TOL: f64 = 1e-8;

const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepMode {
    Fixed,
    /// Armijo backtracking starting from `mu`.
    Backtracking {
        shrink: f64,
        armijo_c: f64,
    },
}

impl StepMode {
    pub const DEFAULT_BACKTRACKING: StepMode = StepMode::Backtracking {
        shrink: 0.5,
        armijo_c: 1e-4,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentConfig {
    pub mu: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub step_mode: StepMode,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig {
            mu: 0.1,
            tol: 1e-8,
            max_iter: 1000,
            step_mode: StepMode::Fixed,
        }
    }
}

impl DescentConfig {
    pub fn fixed(mu: f64, tol: f64, max_iter: usize) -> Self {
        DescentConfig {
            mu,
            tol,
            max_iter,
            step_mode: StepMode::Fixed,
        }
    }

    pub fn backtracking(mu: f64, tol: f64, max_iter: usize) -> Self {
        DescentConfig {
            mu,
            tol,
            max_iter,
            step_mode: StepMode::DEFAULT_BACKTRACKING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol must be non-negative, got {}",
                self.tol
            )));
        }
        if let StepMode::Backtracking { shrink, armijo_c } = self.step_mode {
            if !(shrink > 0.0 && shrink < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "shrink must lie in (0, 1), got {shrink}"
                )));
            }
            if !(armijo_c > 0.0 && armijo_c < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "armijo_c must lie in (0, 1), got {armijo_c}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    MaxIter,
    Diverged,
}

/// Iterates, costs and CW-gradient norms of a run; entry `k` belongs to
/// iteration `k`, so a run that converges at the start has one entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentTrace<P> {
    pub iterates: Vec<P>,
    pub costs: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub termination: Termination,
}

/// A point type that knows its JSON-lines key (`z` or `f`).
pub trait TracePoint: Serialize {
    const KEY: &'static str;
}

impl TracePoint for Complex {
    const KEY: &'static str = "z";
}

impl TracePoint for HVec {
    const KEY: &'static str = "f";
}

impl<P: Clone> DescentTrace<P> {
    /// Number of updates applied.
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn final_point(&self) -> &P {
        self.iterates
            .last()
            .expect("trace has at least the start point")
    }

    pub fn final_cost(&self) -> f64 {
        *self
            .costs
            .last()
            .expect("trace has at least the start point")
    }

    pub fn final_grad_norm(&self) -> f64 {
        *self
            .grad_norms
            .last()
            .expect("trace has at least the start point")
    }
}

impl<P: TracePoint + Clone> DescentTrace<P> {
    /// One JSON object per iteration: `{"iter", "z" | "f", "cost", "grad_norm"}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (k, p) in self.iterates.iter().enumerate() {
            let mut row = serde_json::Map::new();
            row.insert("iter".into(), k.into());
            row.insert(
                P::KEY.into(),
                serde_json::to_value(p).expect("points serialize"),
            );
            row.insert("cost".into(), self.costs[k].into());
            row.insert("grad_norm".into(), self.grad_norms[k].into());
            out.push_str(&serde_json::Value::Object(row).to_string());
            out.push('\n');
        }
        out
    }
}

struct Probe<P> {
    cost: Complex,
    grad: P,
    grad_norm: f64,
}

trait Objective {
    type Point: Clone;

    fn probe(&self, p: &Self::Point) -> Result<Probe<Self::Point>>;
    fn cost(&self, p: &Self::Point) -> Result<Complex>;
    /// `p − t·g`
    fn retract(&self, p: &Self::Point, g: &Self::Point, t: f64) -> Self::Point;
}

struct ScalarCost<'a>(&'a Expr);

impl Objective for ScalarCost<'_> {
    type Point = Complex;

    fn probe(&self, z: &Complex) -> Result<Probe<Complex>> {
        let j: WirtingerJet = eval(self.0, *z)?;
        Ok(Probe {
            cost: j.value,
            grad: j.dzc,
            grad_norm: j.dzc.norm(),
        })
    }

    fn cost(&self, z: &Complex) -> Result<Complex> {
        eval(self.0, *z)
    }

    fn retract(&self, z: &Complex, g: &Complex, t: f64) -> Complex {
        z - g * t
    }
}

struct HilbertCost<'a>(&'a Functional);

impl Objective for HilbertCost<'_> {
    type Point = HVec;

    fn probe(&self, f: &HVec) -> Result<Probe<HVec>> {
        let j = self.0.eval_jet(f)?;
        let grad_norm = j.grad_fc.norm();
        Ok(Probe {
            cost: j.value,
            grad: j.grad_fc,
            grad_norm,
        })
    }

    fn cost(&self, f: &HVec) -> Result<Complex> {
        self.0.eval(f)
    }

    fn retract(&self, f: &HVec, g: &HVec, t: f64) -> HVec {
        f.combine(Complex::new(1.0, 0.0), g, Complex::new(-t, 0.0))
            .expect("gradient has the point's dimension")
    }
}

fn real_cost(cost: Complex, iter: usize) -> Result<f64> {
    let tol = if iter == 0 {
        START_IMAG_TOL
    } else {
        DRIFT_IMAG_TOL
    };
    if cost.im.abs() > tol {
        Err(Error::NonRealCost {
            iter,
            imag: cost.im,
        })
    } else {
        Ok(cost.re)
    }
}

fn descend<O: Objective>(
    obj: &O,
    start: O::Point,
    cfg: &DescentConfig,
) -> Result<DescentTrace<O::Point>> {
    cfg.validate()?;
    let mut trace = DescentTrace {
        iterates: Vec::new(),
        costs: Vec::new(),
        grad_norms: Vec::new(),
        termination: Termination::MaxIter,
    };
    let mut point = start;
    let mut probe = obj.probe(&point)?;
    let initial = real_cost(probe.cost, 0)?;
    let ceiling = initial + (DIVERGENCE_FACTOR - 1.0) * initial.abs().max(f64::MIN_POSITIVE);

    for iter in 0.. {
        let cost = real_cost(probe.cost, iter)?;
        trace.iterates.push(point.clone());
        trace.costs.push(cost);
        trace.grad_norms.push(probe.grad_norm);

        if !cost.is_finite() || cost > ceiling {
            trace.termination = Termination::Diverged;
            break;
        }
        if probe.grad_norm < cfg.tol {
            trace.termination = Termination::Converged;
            break;
        }
        if iter >= cfg.max_iter {
            trace.termination = Termination::MaxIter;
            break;
        }

        point = match cfg.step_mode {
            StepMode::Fixed => obj.retract(&point, &probe.grad, cfg.mu),
            StepMode::Backtracking { shrink, armijo_c } => {
                // first-order decrease along −g is 2t‖g‖² for real costs
                let slope = 2.0 * probe.grad_norm * probe.grad_norm;
                let mut t = cfg.mu;
                let mut accepted = None;
                for _ in 0..MAX_BACKTRACKS {
                    let trial = obj.retract(&point, &probe.grad, t);
                    if let Ok(v) = obj.cost(&trial) {
                        if v.re <= cost - armijo_c * t * slope {
                            accepted = Some(trial);
                            break;
                        }
                    }
                    t *= shrink;
                }
                match accepted {
                    Some(p) => p,
                    None => {
                        warn!("line search failed at iteration {iter}; stopping");
                        trace.termination = Termination::MaxIter;
                        break;
                    }
                }
            }
        };
        probe = obj.probe(&point)?;
        debug!("iter {iter}: cost {cost:e}, |grad| {:e}", probe.grad_norm);
    }
    Ok(trace)
}

/// Minimizes a real-valued expression from `z0`.
pub fn steepest_descent_scalar(
    cost: &Expr,
    z0: Complex,
    cfg: &DescentConfig,
) -> Result<DescentTrace<Complex>> {
    descend(&ScalarCost(cost), z0, cfg)
}

/// Minimizes a real-valued functional on `ℂⁿ` from `f0`.
pub fn steepest_descent_hilbert(
    cost: &Functional,
    f0: &HVec,
    cfg: &DescentConfig,
) -> Result<DescentTrace<HVec>> {
    descend(&HilbertCost(cost), f0.clone(), cfg)
}

/// A least-squares cost over samples `(xₖ, dₖ)`.
///
/// Strict: `T(f) = Σ |dₖ − ⟨xₖ, f⟩|²` over `f ∈ ℂⁿ`.
/// Widely linear: `T(a; b) = Σ |dₖ − ⟨xₖ, a⟩ − ⟨xₖ*, b⟩|²` over the stacked
/// parameter `(a; b) ∈ ℂ²ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub cost: Functional,
    pub sample_dim: usize,
    pub widely_linear: bool,
}

impl LeastSquares {
    /// Dimension of the parameter being optimized.
    pub fn param_dim(&self) -> usize {
        if self.widely_linear {
            2 * self.sample_dim
        } else {
            self.sample_dim
        }
    }

    /// Splits a widely-linear parameter into `(a, b)`.
    pub fn split(&self, theta: &HVec) -> Result<(HVec, Option<HVec>)> {
        if theta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                found: theta.len(),
            });
        }
        if !self.widely_linear {
            return Ok((theta.clone(), None));
        }
        let n = self.sample_dim;
        let a = HVec::new(theta.coords()[..n].to_vec())?;
        let b = HVec::new(theta.coords()[n..].to_vec())?;
        Ok((a, Some(b)))
    }

    pub fn minimize(&self, start: &HVec, cfg: &DescentConfig) -> Result<DescentTrace<HVec>> {
        if start.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                found: start.len(),
            });
        }
        steepest_descent_hilbert(&self.cost, start, cfg)
    }
}

pub fn build_least_squares(x: &[HVec], d: &[Complex], widely_linear: bool) -> Result<LeastSquares> {
    if x.is_empty() || d.is_empty() {
        return Err(Error::EmptyData);
    }
    if x.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: d.len(),
        });
    }
    let n = x[0].len();
    let one = Complex::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(x.len());
    for (xk, dk) in x.iter().zip(d) {
        if xk.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: xk.len(),
            });
        }
        let model = if widely_linear {
            let zeros = HVec::zeros(n);
            Functional::linear_combine(
                one,
                Functional::inner(InnerKind::Wf, xk.concat(&zeros)),
                one,
                Functional::inner(InnerKind::Wf, zeros.concat(&xk.conj())),
            )
        } else {
            Functional::inner(InnerKind::Wf, xk.clone())
        };
        let residual = Functional::sub(Functional::Constant(*dk), model);
        terms.push(Functional::abs2(residual));
    }
    Ok(LeastSquares {
        cost: Functional::Sum(terms),
        sample_dim: n,
        widely_linear,
    })
}

/// One Newton step for a real cost: solves
/// `[[f_zz, f_zz*], [f_z*z, f_z*z*]] (Δz, Δz*)ᵀ = −(f_z, f_z*)ᵀ`
/// and returns `Δz`. A singular block or a solution whose second component
/// is not the conjugate of the first yields [`Error::SingularHessian`].
pub fn newton_step_scalar(cost: &Expr, z: Complex) -> Result<Complex> {
    let jet = propagate_second_order(cost, z)?;
    if jet.value.im.abs() > DRIFT_IMAG_TOL {
        return Err(Error::NonRealCost {
            iter: 0,
            imag: jet.value.im,
        });
    }
    let block = jet.hessian();
    let [[a, b], [c, d]] = block.matrix;
    let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let det = block.determinant();
    if !(det.norm() > SINGULAR_DET_TOL * scale * scale) {
        return Err(Error::SingularHessian);
    }
    let (r0, r1) = (-jet.dz, -jet.dzc);
    let step = (r0 * d - b * r1) / det;
    let step_conj = (a * r1 - c * r0) / det;
    if (step_conj - step.conj()).norm() > NEWTON_CONSISTENCY_TOL * (1.0 + step.norm()) {
        return Err(Error::SingularHessian);
    }
    Ok(step)
}
