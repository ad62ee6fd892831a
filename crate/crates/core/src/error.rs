use thiserror::Error;

/// Errors raised by the library. Refutations (infeasible certificates,
/// violated inequalities) are reported as values, never as errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("orbit diverged at iterate n = {step}")]
    Divergence { step: usize },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
