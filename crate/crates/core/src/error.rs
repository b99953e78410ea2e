use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported circuit: {0}")]
    UnsupportedCircuit(String),

    #[error("{qubits} qubits exceeds the statevector cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("term budget of {budget} exceeded at layer {layer} ({terms} terms)")]
    TermBudget {
        layer: usize,
        terms: usize,
        budget: usize,
    },

    #[error("string with phase ±i has no real expectation")]
    NonHermitian,

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    /// True for errors caused by bad input rather than by an engine.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::UnsupportedCircuit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
