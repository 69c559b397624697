//! Wirtinger gradients of functionals on `ℂⁿ`.
//!
//! `ℂⁿ` is the complexification of `ℝⁿ` with the Euclidean inner product,
//! `⟨f, g⟩ = Σₖ fₖ gₖ*`, linear in the first slot and conjugate-linear in
//! the second. A functional `T` has two gradient vectors at a point `c`,
//! `∇_f T` and `∇_{f*} T`, such that
//!
//! `T(c + h) = T(c) + ⟨h, (∇_f T)*⟩ + ⟨h*, (∇_{f*} T)*⟩ + o(‖h‖)`,
//!
//! i.e. `(∇_f T)ₖ = ∂T/∂fₖ` and `(∇_{f*} T)ₖ = ∂T/∂fₖ*`. A
//! [`FunctionalJet`] bundles both with `T(c)`, and the same linearity,
//! product, reciprocal, quotient and chain rules as the scalar jets apply
//! with vectors in place of scalars.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval, Expr};
use crate::jet::{check_pole, is_finite, Complex, WirtingerJet, DEFAULT_POLE_FLOOR, ZERO};
use crate::oracle::{wirtinger_from_partials, HolomorphyClass, MIN_STEP};

/// An element of `ℂⁿ`, `n ≥ 1`. Serializes as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HVec(Vec<Complex>);

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl HVec {
    pub fn new(coords: Vec<Complex>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(HVec(coords))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "HVec needs at least one coordinate");
        HVec(vec![ZERO; n])
    }

    /// `k`-th standard basis vector of `ℂⁿ`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = HVec::zeros(n);
        v.0[k] = Complex::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Complex] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Complex> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex> {
        self.0.iter()
    }

    pub fn inner(&self, other: &HVec) -> Result<Complex> {
        inner(self, other)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> HVec {
        HVec(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, k: Complex) -> HVec {
        HVec(self.0.iter().map(|c| k * c).collect())
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex, other: &HVec, beta: Complex) -> Result<HVec> {
        check_dims(self.len(), other.len())?;
        Ok(HVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        ))
    }

    pub fn add(&self, other: &HVec) -> Result<HVec> {
        self.combine(Complex::new(1.0, 0.0), other, Complex::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &HVec) -> Result<HVec> {
        self.combine(Complex::new(1.0, 0.0), other, Complex::new(-1.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| is_finite(*c))
    }

    /// Splits `f = u + iv` into its real and imaginary coordinate vectors.
    pub fn parts(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.0.iter().map(|c| c.re).collect(),
            self.0.iter().map(|c| c.im).collect(),
        )
    }

    pub fn concat(&self, other: &HVec) -> HVec {
        HVec(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl Index<usize> for HVec {
    type Output = Complex;

    fn index(&self, k: usize) -> &Complex {
        &self.0[k]
    }
}

impl TryFrom<Vec<Complex>> for HVec {
    type Error = Error;

    fn try_from(v: Vec<Complex>) -> Result<Self> {
        HVec::new(v)
    }
}

/// `⟨f, g⟩ = Σₖ fₖ gₖ*`.
pub fn inner(f: &HVec, g: &HVec) -> Result<Complex> {
    check_dims(f.len(), g.len())?;
    Ok(f.0.iter().zip(&g.0).map(|(a, b)| a * b.conj()).sum())
}

/// The four inner-product functionals with a fixed vector `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InnerKind {
    /// `⟨f, w⟩`
    Fw,
    /// `⟨w, f⟩`
    Wf,
    /// `⟨f*, w⟩`
    Fcw,
    /// `⟨w, f*⟩`
    Wfc,
}

/// Value plus W- and CW-gradients of a scalar functional at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalJet {
    pub value: Complex,
    pub grad_f: HVec,
    pub grad_fc: HVec,
}

/// Jet of `T(f) = ⟨·,·⟩` of the given kind at `c`:
///
/// | kind       | `∇_f` | `∇_{f*}` |
/// |------------|-------|----------|
/// | `⟨f, w⟩`   | `w*`  | `0`      |
/// | `⟨w, f⟩`   | `0`   | `w`      |
/// | `⟨f*, w⟩`  | `0`   | `w*`     |
/// | `⟨w, f*⟩`  | `w`   | `0`      |
pub fn ip_functional(kind: InnerKind, w: &HVec, c: &HVec) -> Result<FunctionalJet> {
    check_dims(w.len(), c.len())?;
    let zero = HVec::zeros(w.len());
    let (value, grad_f, grad_fc) = match kind {
        InnerKind::Fw => (inner(c, w)?, w.conj(), zero),
        InnerKind::Wf => (inner(w, c)?, zero, w.clone()),
        InnerKind::Fcw => (inner(&c.conj(), w)?, zero, w.conj()),
        InnerKind::Wfc => (inner(w, &c.conj())?, w.clone(), zero),
    };
    Ok(FunctionalJet {
        value,
        grad_f,
        grad_fc,
    })
}

impl FunctionalJet {
    pub fn constant(k: Complex, n: usize) -> Self {
        FunctionalJet {
            value: k,
            grad_f: HVec::zeros(n),
            grad_fc: HVec::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.grad_f.len()
    }

    pub fn linear_combine(alpha: Complex, a: &Self, beta: Complex, b: &Self) -> Result<Self> {
        Ok(FunctionalJet {
            value: alpha * a.value + beta * b.value,
            grad_f: a.grad_f.combine(alpha, &b.grad_f, beta)?,
            grad_fc: a.grad_fc.combine(alpha, &b.grad_fc, beta)?,
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(FunctionalJet {
            value: self.value * rhs.value,
            grad_f: self.grad_f.combine(rhs.value, &rhs.grad_f, self.value)?,
            grad_fc: self.grad_fc.combine(rhs.value, &rhs.grad_fc, self.value)?,
        })
    }

    /// `T*`: gradients swap places and are conjugated.
    pub fn conj(&self) -> Self {
        FunctionalJet {
            value: self.value.conj(),
            grad_f: self.grad_fc.conj(),
            grad_fc: self.grad_f.conj(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        check_pole(self.value, DEFAULT_POLE_FLOOR)?;
        let k = -(self.value * self.value).inv();
        Ok(FunctionalJet {
            value: self.value.inv(),
            grad_f: self.grad_f.scale(k),
            grad_fc: self.grad_fc.scale(k),
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        check_pole(rhs.value, DEFAULT_POLE_FLOOR)?;
        let sq = rhs.value * rhs.value;
        let (a, b) = (rhs.value / sq, -self.value / sq);
        Ok(FunctionalJet {
            value: self.value / rhs.value,
            grad_f: self.grad_f.combine(a, &rhs.grad_f, b)?,
            grad_fc: self.grad_fc.combine(a, &rhs.grad_fc, b)?,
        })
    }

    /// `S ∘ T` for a scalar `S` given as an expression in `z`:
    /// `∇_f(S∘T) = S_z ∇_f T + S_z* (∇_{f*} T)*` and
    /// `∇_{f*}(S∘T) = S_z ∇_{f*} T + S_z* (∇_f T)*`.
    pub fn outer_chain(&self, outer: &Expr) -> Result<Self> {
        let s: WirtingerJet = eval(outer, self.value)?;
        Ok(FunctionalJet {
            value: s.value,
            grad_f: self.grad_f.combine(s.dz, &self.grad_fc.conj(), s.dzc)?,
            grad_fc: self.grad_fc.combine(s.dz, &self.grad_f.conj(), s.dzc)?,
        })
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.value) && self.grad_f.is_finite() && self.grad_fc.is_finite()
    }

    /// `2 Re⟨h, (∇_f T)*⟩`, the first-order change of a real `T` along `h`.
    pub fn directional_change(&self, h: &HVec) -> Result<f64> {
        Ok(2.0 * inner(h, &self.grad_f.conj())?.re)
    }

    /// First-order model `T(c) + ⟨h, (∇_f T)*⟩ + ⟨h*, (∇_{f*} T)*⟩`.
    pub fn linear_model(&self, h: &HVec) -> Result<Complex> {
        Ok(self.value + inner(h, &self.grad_f.conj())? + inner(&h.conj(), &self.grad_fc.conj())?)
    }
}

/// A functional built from inner products, constants and the jet algebra.
///
/// Evaluating it produces either a [`FunctionalJet`] (through the gradient
/// rules) or just the value (through plain arithmetic); the value path is
/// what the finite-difference oracle sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Functional {
    Constant(Complex),
    Inner(InnerKind, HVec),
    LinearCombine(Complex, Box<Functional>, Complex, Box<Functional>),
    Sum(Vec<Functional>),
    Mul(Box<Functional>, Box<Functional>),
    Conj(Box<Functional>),
    Recip(Box<Functional>),
    Div(Box<Functional>, Box<Functional>),
    Chain(Expr, Box<Functional>),
}

#[allow(clippy::should_implement_trait)]
impl Functional {
    pub fn inner(kind: InnerKind, w: HVec) -> Self {
        Functional::Inner(kind, w)
    }

    pub fn linear_combine(alpha: Complex, a: Functional, beta: Complex, b: Functional) -> Self {
        Functional::LinearCombine(alpha, Box::new(a), beta, Box::new(b))
    }

    pub fn sub(a: Functional, b: Functional) -> Self {
        Self::linear_combine(Complex::new(1.0, 0.0), a, Complex::new(-1.0, 0.0), b)
    }

    pub fn mul(a: Functional, b: Functional) -> Self {
        Functional::Mul(Box::new(a), Box::new(b))
    }

    pub fn conj(a: Functional) -> Self {
        Functional::Conj(Box::new(a))
    }

    pub fn recip(a: Functional) -> Self {
        Functional::Recip(Box::new(a))
    }

    pub fn div(a: Functional, b: Functional) -> Self {
        Functional::Div(Box::new(a), Box::new(b))
    }

    pub fn chain(outer: Expr, inner: Functional) -> Self {
        Functional::Chain(outer, Box::new(inner))
    }

    /// `|T|² = T·T*`.
    pub fn abs2(a: Functional) -> Self {
        Functional::mul(a.clone(), Functional::conj(a))
    }

    /// `‖f − w‖² = Σₖ |⟨f, eₖ⟩ − wₖ|²`.
    pub fn squared_distance(w: &HVec) -> Self {
        let n = w.len();
        Functional::Sum(
            (0..n)
                .map(|k| {
                    Functional::abs2(Functional::sub(
                        Functional::inner(InnerKind::Fw, HVec::basis(n, k)),
                        Functional::Constant(w[k]),
                    ))
                })
                .collect(),
        )
    }

    /// Jet at `c` via the gradient rules.
    pub fn eval_jet(&self, c: &HVec) -> Result<FunctionalJet> {
        let jet = self.jet_node(c)?;
        if !jet.is_finite() {
            return Err(Error::NonFinite("functional jet"));
        }
        Ok(jet)
    }

    fn jet_node(&self, c: &HVec) -> Result<FunctionalJet> {
        let n = c.len();
        match self {
            Functional::Constant(k) => Ok(FunctionalJet::constant(*k, n)),
            Functional::Inner(kind, w) => ip_functional(*kind, w, c),
            Functional::LinearCombine(alpha, a, beta, b) => {
                FunctionalJet::linear_combine(*alpha, &a.jet_node(c)?, *beta, &b.jet_node(c)?)
            }
            Functional::Sum(terms) => {
                let mut acc = FunctionalJet::constant(ZERO, n);
                let one = Complex::new(1.0, 0.0);
                for t in terms {
                    acc = FunctionalJet::linear_combine(one, &acc, one, &t.jet_node(c)?)?;
                }
                Ok(acc)
            }
            Functional::Mul(a, b) => a.jet_node(c)?.mul(&b.jet_node(c)?),
            Functional::Conj(a) => Ok(a.jet_node(c)?.conj()),
            Functional::Recip(a) => a.jet_node(c)?.recip(),
            Functional::Div(a, b) => a.jet_node(c)?.div(&b.jet_node(c)?),
            Functional::Chain(outer, a) => a.jet_node(c)?.outer_chain(outer),
        }
    }

    /// `T(c)` by plain arithmetic, without any gradient rule.
    pub fn eval(&self, c: &HVec) -> Result<Complex> {
        let v = self.value_node(c)?;
        if !is_finite(v) {
            return Err(Error::NonFinite("functional value"));
        }
        Ok(v)
    }

    fn value_node(&self, c: &HVec) -> Result<Complex> {
        Ok(match self {
            Functional::Constant(k) => *k,
            Functional::Inner(kind, w) => match kind {
                InnerKind::Fw => inner(c, w)?,
                InnerKind::Wf => inner(w, c)?,
                InnerKind::Fcw => inner(&c.conj(), w)?,
                InnerKind::Wfc => inner(w, &c.conj())?,
            },
            Functional::LinearCombine(alpha, a, beta, b) => {
                alpha * a.value_node(c)? + beta * b.value_node(c)?
            }
            Functional::Sum(terms) => {
                let mut acc = ZERO;
                for t in terms {
                    acc += t.value_node(c)?;
                }
                acc
            }
            Functional::Mul(a, b) => a.value_node(c)? * b.value_node(c)?,
            Functional::Conj(a) => a.value_node(c)?.conj(),
            Functional::Recip(a) => {
                let v = a.value_node(c)?;
                check_pole(v, DEFAULT_POLE_FLOOR)?;
                v.inv()
            }
            Functional::Div(a, b) => {
                let (x, y) = (a.value_node(c)?, b.value_node(c)?);
                check_pole(y, DEFAULT_POLE_FLOOR)?;
                x / y
            }
            Functional::Chain(outer, a) => eval::<Complex>(outer, a.value_node(c)?)?,
        })
    }
}

/// Central-difference partial gradients `(∇₁T, ∇₂T)`: coordinate `k` of
/// `∇₁T` is `∂T/∂uₖ` and of `∇₂T` is `∂T/∂vₖ` for `f = u + iv`, each
/// complex (real and imaginary parts of `T` together).
pub fn fd_gradients<F>(t: F, c: &HVec, step: f64) -> Result<(HVec, HVec)>
where
    F: Fn(&HVec) -> Result<Complex>,
{
    if !(step >= MIN_STEP) {
        return Err(Error::StepTooSmall(step));
    }
    let n = c.len();
    let mut g1 = Vec::with_capacity(n);
    let mut g2 = Vec::with_capacity(n);
    let mut probe = c.clone();
    for k in 0..n {
        for (dir, out) in [
            (Complex::new(step, 0.0), &mut g1),
            (Complex::new(0.0, step), &mut g2),
        ] {
            probe.0[k] = c[k] + dir;
            let plus = t(&probe)?;
            probe.0[k] = c[k] - dir;
            let minus = t(&probe)?;
            probe.0[k] = c[k];
            out.push((plus - minus) / (2.0 * step));
        }
    }
    Ok((HVec(g1), HVec(g2)))
}

/// `(∇_f T, ∇_{f*} T) = (½(∇₁ − i∇₂), ½(∇₁ + i∇₂))` by central differences.
pub fn fd_wirtinger_gradients<F>(t: F, c: &HVec, step: f64) -> Result<(HVec, HVec)>
where
    F: Fn(&HVec) -> Result<Complex>,
{
    let (g1, g2) = fd_gradients(t, c, step)?;
    let (w, cw): (Vec<_>, Vec<_>) = g1
        .iter()
        .zip(g2.iter())
        .map(|(a, b)| wirtinger_from_partials(*a, *b))
        .unzip();
    Ok((HVec(w), HVec(cw)))
}

/// Fréchet Cauchy–Riemann classification: `‖∇_{f*}T‖` small means
/// holomorphic, `‖∇_f T‖` small conjugate-holomorphic.
pub fn classify_functional<F>(t: F, c: &HVec, step: f64, tol: f64) -> Result<HolomorphyClass>
where
    F: Fn(&HVec) -> Result<Complex>,
{
    t(c)?;
    let (w, cw) = fd_wirtinger_gradients(t, c, step)?;
    Ok(HolomorphyClass::from_residuals(cw.norm(), w.norm(), tol))
}

/// Gradients of a `ℂᵛ`-valued operator, one `(∇_f, ∇_{f*})` row per
/// component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJet {
    pub values: Vec<Complex>,
    pub grad_f: Vec<HVec>,
    pub grad_fc: Vec<HVec>,
}

impl VectorJet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, k: usize) -> FunctionalJet {
        FunctionalJet {
            value: self.values[k],
            grad_f: self.grad_f[k].clone(),
            grad_fc: self.grad_fc[k].clone(),
        }
    }
}

pub fn stack_vector_operator(components: Vec<FunctionalJet>) -> Result<VectorJet> {
    let n = components.first().ok_or(Error::EmptyData)?.dim();
    let mut out = VectorJet {
        values: Vec::with_capacity(components.len()),
        grad_f: Vec::with_capacity(components.len()),
        grad_fc: Vec::with_capacity(components.len()),
    };
    for j in components {
        check_dims(n, j.dim())?;
        check_dims(n, j.grad_fc.len())?;
        out.values.push(j.value);
        out.grad_f.push(j.grad_f);
        out.grad_fc.push(j.grad_fc);
    }
    Ok(out)
}
