//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("quiver has an oriented cycle through {0}")]
    Acyclicity(String),
    #[error("zero representation: {0}")]
    ZeroRepresentation(String),
    #[error("invalid weight: {0}")]
    Weight(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
