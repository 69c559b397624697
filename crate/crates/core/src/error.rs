use thiserror::Error;

/// Errors produced by differentiation, parsing, oracles and descent.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("`{name}` at offset {offset} takes {expected} argument(s), found {found}")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("pole: |value| = {magnitude:e} is below the pole floor")]
    Pole { magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("primitive `{0}` is not supported at second order")]
    UnsupportedPrimitive(&'static str),

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("finite-difference step {0:e} is below 1e-12")]
    StepTooSmall(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("least-squares problem has no samples")]
    EmptyData,

    #[error("cost is not real: imaginary part {imag:e} at iteration {iter}")]
    NonRealCost { iter: usize, imag: f64 },

    #[error("Hessian block is singular or inconsistent")]
    SingularHessian,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for the parse-time family (syntax, unknown identifier, arity).
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Arity { .. }
        )
    }

    /// True for evaluation failures at a point (pole, domain, unsupported, non-finite).
    pub fn is_evaluation_error(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::Domain(_)
                | Error::UnsupportedPrimitive(_)
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
