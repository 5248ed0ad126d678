use thiserror::Error;

/// Errors raised by problem contracts and optimizers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A solution encoding does not match the problem kind.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Structurally invalid input (duplicate city, bad parameter, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The neighborhood of the current solution is empty.
    #[error("no neighbor available from state {0}")]
    NoNeighbor(String),

    /// The problem does not support the requested operation.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// No run in the ensemble reached the success predicate.
    #[error("computational effort undefined: no successful run")]
    EffortUndefined,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
