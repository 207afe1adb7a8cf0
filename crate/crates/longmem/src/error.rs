use thiserror::Error;

/// Errors produced by the estimation, simulation and inference routines.
#[derive(Debug, Error)]
pub enum LongmemError {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical operation failed (non-positive-definite matrix, pole,
    /// near-singular correction, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The optimizer could not produce a usable estimate.
    #[error("estimation failed: {0}")]
    EstimationFailed(String),
}

pub type Result<T> = std::result::Result<T, LongmemError>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LongmemError::InvalidArgument(msg.into()))
}

pub(crate) fn num_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LongmemError::Numerical(msg.into()))
}
