//! Wirtinger calculus for functions of a complex variable.
//!
//! * [`jet`]: first-order jets carrying `(f, ∂f/∂z, ∂f/∂z*)`.
//! * [`second`]: second-order jets and the complex Hessian block.
//! * [`expr`]: the expression language over `z` and `z*`.
//! * [`oracle`]: central-difference derivatives and Cauchy–Riemann checks.
//! * [`hilbert`]: W/CW gradients of functionals on `ℂⁿ`.
//! * [`optimize`]: steepest descent and Newton steps on real costs.
//! * [`cli`]: the command implementations behind the `wirt` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expr;
pub mod hilbert;
pub mod jet;
pub mod optimize;
pub mod oracle;
pub mod second;

pub use error::{Error, Result};
pub use expr::{eval, eval_jet, format, parse, parse_complex, Evaluation, Expr};
pub use hilbert::{Functional, FunctionalJet, HVec, InnerKind};
pub use jet::{Complex, JetCarrier, Primitive, WirtingerJet};
pub use optimize::{DescentConfig, DescentTrace, StepMode, Termination};
pub use oracle::{HolomorphyClass, Verdict};
pub use second::{HessianBlock, SecondOrderJet};
