//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated its domain (sigma <= 0, tau <= 0, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Vector/matrix length does not match the layer or dataset it is used with.
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// A training or sweep configuration failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A dataset file could not be parsed. Lines are 1-based.
    #[error("data format error at line {line}: {msg}")]
    DataFormat { line: usize, msg: String },

    /// An operation that needs data received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A model checkpoint is corrupt or of the wrong format.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
