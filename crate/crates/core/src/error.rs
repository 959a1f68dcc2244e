use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies on a branch cut: {0}")]
    Branch(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("{what} did not converge (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    Convergence {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("inconsistent bookkeeping: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(what: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Error::Convergence {
            what: what.into(),
            residual,
            tolerance,
        }
    }
}
