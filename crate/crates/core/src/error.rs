use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("malformed measurement: {0}")]
    MalformedMeasurement(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("security check `{0}` had no basis-matched samples")]
    IndeterminateCheck(&'static str),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
