//! C ABI for the `wirtinger` engine.
//!
//! Expressions and least-squares problems are opaque handles created by
//! `wirt_*_new`/`wirt_expr_parse` and released by the matching `*_free`.
//! Every fallible call returns a [`WirtStatus`]; on failure the message is
//! available from [`wirt_last_error_message`] on the same thread.
//!
//! Handles are not thread-safe; use one per thread or synchronise outside.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wirtinger::hilbert::HVec;
use wirtinger::optimize::{
    build_least_squares, newton_step_scalar, steepest_descent_scalar, LeastSquares,
};
use wirtinger::oracle::classify;
use wirtinger::oracle::expr_fn;
use wirtinger::second::propagate_second_order;
use wirtinger::{
    eval, parse, Complex, DescentConfig, DescentTrace, Error, Expr, StepMode, Termination, Verdict,
    WirtingerJet,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WirtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    UnknownIdentifier = 4,
    Arity = 5,
    Pole = 6,
    Domain = 7,
    UnsupportedPrimitive = 8,
    NonFinite = 9,
    StepTooSmall = 10,
    DimensionMismatch = 11,
    EmptyData = 12,
    NonRealCost = 13,
    SingularHessian = 14,
    InvalidConfig = 15,
    Panic = 99,
}

impl From<&Error> for WirtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } => WirtStatus::Syntax,
            Error::UnknownIdentifier { .. } => WirtStatus::UnknownIdentifier,
            Error::Arity { .. } => WirtStatus::Arity,
            Error::Pole { .. } => WirtStatus::Pole,
            Error::Domain(_) => WirtStatus::Domain,
            Error::UnsupportedPrimitive(_) => WirtStatus::UnsupportedPrimitive,
            Error::NonFinite(_) => WirtStatus::NonFinite,
            Error::StepTooSmall(_) => WirtStatus::StepTooSmall,
            Error::DimensionMismatch { .. } => WirtStatus::DimensionMismatch,
            Error::EmptyData => WirtStatus::EmptyData,
            Error::NonRealCost { .. } => WirtStatus::NonRealCost,
            Error::SingularHessian => WirtStatus::SingularHessian,
            Error::InvalidConfig(_) => WirtStatus::InvalidConfig,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WirtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for WirtComplex {
    fn from(c: Complex) -> Self {
        WirtComplex { re: c.re, im: c.im }
    }
}

impl From<WirtComplex> for Complex {
    fn from(c: WirtComplex) -> Self {
        Complex::new(c.re, c.im)
    }
}

/// Value and first-order Wirtinger derivatives.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WirtJet {
    pub value: WirtComplex,
    pub dz: WirtComplex,
    pub dzc: WirtComplex,
}

/// Value, first- and second-order Wirtinger derivatives.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WirtSecondOrderJet {
    pub value: WirtComplex,
    pub dz: WirtComplex,
    pub dzc: WirtComplex,
    pub dzz: WirtComplex,
    pub dzzc: WirtComplex,
    pub dzcz: WirtComplex,
    pub dzczc: WirtComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WirtVerdict {
    Holomorphic = 0,
    ConjugateHolomorphic = 1,
    Both = 2,
    Neither = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtClassification {
    pub verdict: WirtVerdict,
    pub cr_residual: f64,
    pub conj_cr_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtDescentConfig {
    pub mu: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo backtracking (shrink 0.5, c 1e-4) instead of a fixed step.
    pub backtrack: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WirtTermination {
    Converged = 0,
    MaxIter = 1,
    Diverged = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtDescentResult {
    pub termination: WirtTermination,
    pub iterations: usize,
    pub final_cost: f64,
    pub final_grad_norm: f64,
}

/// Opaque parsed expression.
pub struct WirtExpr {
    expr: Expr,
}

/// Opaque least-squares problem.
pub struct WirtLeastSquares {
    problem: LeastSquares,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next `wirt_*` call on the same thread.
#[no_mangle]
pub extern "C" fn wirt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

fn guard(f: impl FnOnce() -> Result<(), WirtStatus>) -> WirtStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WirtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic");
            WirtStatus::Panic
        }
    }
}

fn fail(e: Error) -> WirtStatus {
    set_last_error(&e.to_string());
    WirtStatus::from(&e)
}

fn null(what: &str) -> WirtStatus {
    set_last_error(&format!("null pointer: {what}"));
    WirtStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, WirtStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), WirtStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn to_config(c: &WirtDescentConfig) -> DescentConfig {
    DescentConfig {
        mu: c.mu,
        tol: c.tol,
        max_iter: c.max_iter,
        step_mode: if c.backtrack {
            StepMode::DEFAULT_BACKTRACKING
        } else {
            StepMode::Fixed
        },
    }
}

fn to_result<P: Clone>(t: &DescentTrace<P>) -> WirtDescentResult {
    WirtDescentResult {
        termination: match t.termination {
            Termination::Converged => WirtTermination::Converged,
            Termination::MaxIter => WirtTermination::MaxIter,
            Termination::Diverged => WirtTermination::Diverged,
        },
        iterations: t.iterations(),
        final_cost: t.final_cost(),
        final_grad_norm: t.final_grad_norm(),
    }
}

/// Parses a NUL-terminated expression. On a parse error `*error_offset`
/// (if non-NULL) receives the byte offset.
#[no_mangle]
pub unsafe extern "C" fn wirt_expr_parse(
    text: *const c_char,
    out: *mut *mut WirtExpr,
    error_offset: *mut usize,
) -> WirtStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let bytes = CStr::from_ptr(text).to_bytes();
        let s = std::str::from_utf8(bytes).map_err(|e| {
            set_last_error(&e.to_string());
            if !error_offset.is_null() {
                error_offset.write(e.valid_up_to());
            }
            WirtStatus::InvalidUtf8
        })?;
        match parse(s) {
            Ok(expr) => write(out, Box::into_raw(Box::new(WirtExpr { expr })), "out"),
            Err(e) => {
                let offset = match &e {
                    Error::Syntax { offset, .. }
                    | Error::UnknownIdentifier { offset, .. }
                    | Error::Arity { offset, .. } => Some(*offset),
                    _ => None,
                };
                if let (Some(o), false) = (offset, error_offset.is_null()) {
                    error_offset.write(o);
                }
                Err(fail(e))
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn wirt_expr_free(expr: *mut WirtExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Canonical text of an expression; release with [`wirt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wirt_expr_format(
    expr: *const WirtExpr,
    out: *mut *mut c_char,
) -> WirtStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let s = CString::new(e.expr.to_string()).expect("formatted expression has no NUL");
        write(out, s.into_raw(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn wirt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn wirt_expr_eval(
    expr: *const WirtExpr,
    at: WirtComplex,
    out: *mut WirtComplex,
) -> WirtStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let v: Complex = eval(&e.expr, at.into()).map_err(fail)?;
        write(out, v.into(), "out")
    })
}

/// Value, ∂f/∂z and ∂f/∂z* at `at`.
#[no_mangle]
pub unsafe extern "C" fn wirt_expr_diff(
    expr: *const WirtExpr,
    at: WirtComplex,
    out: *mut WirtJet,
) -> WirtStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let j: WirtingerJet = eval(&e.expr, at.into()).map_err(fail)?;
        write(
            out,
            WirtJet {
                value: j.value.into(),
                dz: j.dz.into(),
                dzc: j.dzc.into(),
            },
            "out",
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn wirt_expr_hessian(
    expr: *const WirtExpr,
    at: WirtComplex,
    out: *mut WirtSecondOrderJet,
) -> WirtStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let j = propagate_second_order(&e.expr, at.into()).map_err(fail)?;
        write(
            out,
            WirtSecondOrderJet {
                value: j.value.into(),
                dz: j.dz.into(),
                dzc: j.dzc.into(),
                dzz: j.dzz.into(),
                dzzc: j.dzzc.into(),
                dzcz: j.dzcz.into(),
                dzczc: j.dzczc.into(),
            },
            "out",
        )
    })
}

/// Cauchy–Riemann classification by central differences.
#[no_mangle]
pub unsafe extern "C" fn wirt_expr_classify(
    expr: *const WirtExpr,
    at: WirtComplex,
    step: f64,
    tol: f64,
    out: *mut WirtClassification,
) -> WirtStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let k = classify(expr_fn(&e.expr), at.into(), step, tol).map_err(fail)?;
        let verdict = match k.verdict {
            Verdict::Holomorphic => WirtVerdict::Holomorphic,
            Verdict::ConjugateHolomorphic => WirtVerdict::ConjugateHolomorphic,
            Verdict::Both => WirtVerdict::Both,
            Verdict::Neither => WirtVerdict::Neither,
        };
        write(
            out,
            WirtClassification {
                verdict,
                cr_residual: k.cr_residual,
                conj_cr_residual: k.conj_cr_residual,
            },
            "out",
        )
    })
}

/// One Newton step on a real-valued cost; `out` receives `z + Δz`.
#[no_mangle]
pub unsafe extern "C" fn wirt_newton_step(
    cost: *const WirtExpr,
    z: WirtComplex,
    out: *mut WirtComplex,
) -> WirtStatus {
    guard(|| {
        let e = deref(cost, "cost")?;
        let z: Complex = z.into();
        let step = newton_step_scalar(&e.expr, z).map_err(fail)?;
        write(out, (z + step).into(), "out")
    })
}

/// Steepest descent on a real-valued scalar cost. `final_point` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wirt_minimize(
    cost: *const WirtExpr,
    z0: WirtComplex,
    config: *const WirtDescentConfig,
    final_point: *mut WirtComplex,
    out: *mut WirtDescentResult,
) -> WirtStatus {
    guard(|| {
        let e = deref(cost, "cost")?;
        let cfg = to_config(deref(config, "config")?);
        let trace = steepest_descent_scalar(&e.expr, z0.into(), &cfg).map_err(fail)?;
        if !final_point.is_null() {
            final_point.write((*trace.final_point()).into());
        }
        write(out, to_result(&trace), "out")
    })
}

/// Builds a least-squares problem from `m` samples of dimension `n`
/// (`x` row-major, `m * n` entries) and `m` targets.
#[no_mangle]
pub unsafe extern "C" fn wirt_least_squares_new(
    x: *const WirtComplex,
    m: usize,
    n: usize,
    d: *const WirtComplex,
    widely_linear: bool,
    out: *mut *mut WirtLeastSquares,
) -> WirtStatus {
    guard(|| {
        if m == 0 || n == 0 {
            return Err(fail(Error::EmptyData));
        }
        if x.is_null() {
            return Err(null("x"));
        }
        if d.is_null() {
            return Err(null("d"));
        }
        let total = m
            .checked_mul(n)
            .ok_or_else(|| fail(Error::InvalidConfig("m * n overflows".into())))?;
        let xs = std::slice::from_raw_parts(x, total);
        let ds: Vec<Complex> = std::slice::from_raw_parts(d, m)
            .iter()
            .map(|&c| c.into())
            .collect();
        let rows = xs
            .chunks(n)
            .map(|row| HVec::new(row.iter().map(|&c| c.into()).collect()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        let problem = build_least_squares(&rows, &ds, widely_linear).map_err(fail)?;
        write(
            out,
            Box::into_raw(Box::new(WirtLeastSquares { problem })),
            "out",
        )
    })
}

/// Length of the parameter vector: `n`, or `2n` when widely linear.
#[no_mangle]
pub unsafe extern "C" fn wirt_least_squares_param_dim(ls: *const WirtLeastSquares) -> usize {
    ls.as_ref().map_or(0, |l| l.problem.param_dim())
}

/// Minimizes from zero; `theta` receives `theta_len` (= param dim) entries.
#[no_mangle]
pub unsafe extern "C" fn wirt_least_squares_minimize(
    ls: *const WirtLeastSquares,
    config: *const WirtDescentConfig,
    theta: *mut WirtComplex,
    theta_len: usize,
    out: *mut WirtDescentResult,
) -> WirtStatus {
    guard(|| {
        let l = deref(ls, "ls")?;
        let cfg = to_config(deref(config, "config")?);
        let dim = l.problem.param_dim();
        if theta_len != dim {
            return Err(fail(Error::DimensionMismatch {
                expected: dim,
                found: theta_len,
            }));
        }
        if theta.is_null() {
            return Err(null("theta"));
        }
        let trace = l.problem.minimize(&HVec::zeros(dim), &cfg).map_err(fail)?;
        let dst = std::slice::from_raw_parts_mut(theta, dim);
        for (slot, c) in dst.iter_mut().zip(trace.final_point().iter()) {
            *slot = (*c).into();
        }
        write(out, to_result(&trace), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn wirt_least_squares_free(ls: *mut WirtLeastSquares) {
    if !ls.is_null() {
        drop(Box::from_raw(ls));
    }
}
