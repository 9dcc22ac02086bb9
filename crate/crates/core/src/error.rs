use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not symmetric (entry ({row}, {col}) differs by {diff:e})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})")]
    NotPositiveSemidefinite { min_eig: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("certificate must be nonzero")]
    ZeroCertificate,
    #[error("inner solve did not converge after {iterations} iterations (residual {residual:e})")]
    InnerSolve {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },
    #[error("invalid instance request: {0}")]
    InvalidInstance(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
