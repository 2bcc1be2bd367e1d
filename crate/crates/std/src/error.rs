use std::io;
use std::path::{Path, PathBuf};

use lzsm_core::Error as CoreError;

/// Failure of a CLI command. Each variant has a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad command line or configuration: exit 1.
    #[error("config: {0}")]
    Config(String),
    /// Output could not be written: exit 1.
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    /// Input could not be read: exit 2.
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    /// Malformed input file, with 1-based line number: exit 2.
    #[error("{}:{line}: {msg}", path.display())]
    Format { path: PathBuf, line: usize, msg: String },
    /// Well-formed input that the requested operation cannot use: exit 2.
    #[error("data: {0}")]
    Data(String),
    /// A fit ran but did not converge, or found nothing to fit: exit 3.
    #[error("fit: {0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Write { .. } => 1,
            CliError::Read { .. } | CliError::Format { .. } | CliError::Data(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    /// Map a core error raised while processing input data.
    pub fn from_data(e: CoreError) -> Self {
        match e {
            CoreError::NoDecay => CliError::NotConverged(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }

    pub fn write(path: &Path, source: io::Error) -> Self {
        CliError::Write { path: path.to_path_buf(), source }
    }

    pub fn read(path: &Path, source: io::Error) -> Self {
        CliError::Read { path: path.to_path_buf(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
