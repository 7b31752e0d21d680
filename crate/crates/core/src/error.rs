use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A result left the finite floating point range.
    #[error("numeric domain error: {0}")]
    Domain(String),

    #[error("scenario rejected: {0}")]
    ScenarioRejected(String),

    #[error("scenario generation failed after {attempts} draws for {mode} mode")]
    Generation { mode: &'static str, attempts: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("state mismatch: {0}")]
    State(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{path}: {source}")]
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

    /// True for errors caused by the numbers themselves rather than the data
    /// or configuration around them.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}
