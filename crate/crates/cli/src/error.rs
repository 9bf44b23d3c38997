use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything a command can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Tree(#[from] amt_core::Error),
    #[error("proof does not verify against the given root")]
    VerificationFailed,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    /// 0 success, 1 bad input, 2 failed verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed => 2,
            _ => 1,
        }
    }
}
