use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("function {0} is not permissible for this scheme")]
    NotPermissible(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}
