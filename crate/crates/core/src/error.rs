use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    /// A precondition of an operation was violated (dimension mismatch, bad index, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Points do not match the geometry expected by a kernel or design.
    #[error("geometry mismatch: {0}")]
    Geometry(String),

    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Cholesky factorization broke down at `pivot` (0-based).
    #[error("Gram matrix is singular or not positive definite (pivot {pivot}, value {value:e})")]
    SingularGram { pivot: usize, value: f64 },

    /// Two spectral measures do not share the same atoms; the measures are orthogonal.
    #[error("atom mismatch at position {index}: {detail}")]
    AtomMismatch { index: usize, detail: String },

    /// Every multistart of the likelihood search ended on a penalized value.
    #[error("optimization failed: {0}")]
    OptimizationFailed(String),
}

pub type Result<T> = std::result::Result<T, GpError>;

pub(crate) fn contract(msg: impl Into<String>) -> GpError {
    GpError::Contract(msg.into())
}
