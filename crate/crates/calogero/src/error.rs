//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("construction failed: {0}")]
    Construction(String),

    /// The base point is too close to the singular set of the r-matrix.
    #[error("singular configuration: smallest singular value {sigma:.3e} below threshold {threshold:.3e}")]
    Singular { sigma: f64, threshold: f64 },

    #[error("Cayley transform undefined: {0}")]
    CayleyDomain(String),

    #[error("Newton iteration failed to converge after {iters} iterations (last residual {residual:.3e})")]
    NewtonDivergence { iters: usize, residual: f64 },

    #[error("matrix logarithm branch failure: {0}")]
    LogBranch(String),

    #[error("element left the real form: imaginary residue {0:.3e}")]
    RealFormViolation(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigen solver failed: {0}")]
    EigenFailure(String),

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
