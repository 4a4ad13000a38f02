use std::path::PathBuf;

use thiserror::Error;

use crate::cli::ConfigError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Zero (or non-finite) pivot met during tridiagonal elimination.
    #[error("singular matrix: zero pivot at row {row}")]
    SingularMatrix { row: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("configuration has {} error(s):\n{}", .0.len(), render_config_errors(.0))]
    Config(Vec<ConfigError>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

fn render_config_errors(errors: &[ConfigError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
