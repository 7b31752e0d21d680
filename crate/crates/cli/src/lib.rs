//! Pipeline commands behind the `laserphm` binary: generate, preprocess,
//! train, evaluate and diagnose. Each command reads a [`RunConfig`] and
//! writes deterministic files.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{
    diagnose, evaluate, generate, preprocess, train, DiagnoseInputs, Diagnosis, GenerateSummary,
    Manifest, ModeProbabilities, TrainSummary,
};
pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] laserphm::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 data or file, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numeric() => 4,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}
