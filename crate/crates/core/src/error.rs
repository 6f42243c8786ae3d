use thiserror::Error;

/// Errors raised by the library. Numerical verdicts (frame / Bessel,
/// failed checks) are data, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GFrameError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("element is not positive (min eigenvalue {min_eigenvalue:e}, tolerance {tol:e})")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("operator is not Hermitian (residual {residual:e}, tolerance {tol:e})")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("operator is not positive definite (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("operator is not surjective (smallest singular value of adjoint {min_singular:e}, tolerance {tol:e})")]
    NotSurjective { min_singular: f64, tol: f64 },

    #[error("family is not a frame (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NotAFrame { min_eigenvalue: f64, threshold: f64 },

    #[error("commutation assumption violated: {0}")]
    CommutationViolated(String),

    #[error("measure mismatch: {0}")]
    MeasureMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, GFrameError>;
