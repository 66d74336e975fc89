//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by precondition violations and failed computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("register of {n_qubits} qubits exceeds the dense-simulation limit of {limit}")]
    RegisterTooLarge { n_qubits: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("objective returned non-finite value {value} at evaluation {eval_index}")]
    NonFiniteObjective { value: f64, eval_index: usize },

    #[error("no association mapping for class {0}")]
    MissingAssociation(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
