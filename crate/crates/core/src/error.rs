use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ingestion, file formats, and argument validation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("ingest error at row {row}: {message}")]
    Ingest { row: u64, message: String },

    #[error("binary format error: {0}")]
    Format(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid table: {0}")]
    Invalid(#[from] crate::log_model::Violation),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
