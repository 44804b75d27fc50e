use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] spectra_core::Error),

    #[error("{0}")]
    NotConverged(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Core(_) | CliError::Io { .. } => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
