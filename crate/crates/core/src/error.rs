use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown concept: {0}")]
    UnknownConcept(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bad container format: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    IoAt {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io_at(path: &Path, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for errors caused by bad input data rather than the environment.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Validation(_) | Error::Format(_) | Error::Json(_) | Error::IoAt { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
