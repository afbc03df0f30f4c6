use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain accepted by an operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input violates a precondition of an algorithm, e.g. a
    /// non-positive pixel entering a Richardson-Lucy step.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }
}
