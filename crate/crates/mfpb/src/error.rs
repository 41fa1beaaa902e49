use std::path::{Path, PathBuf};

use thiserror::Error;

/// Everything a command can fail with. [`CliError::exit_code`] maps each
/// kind to the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: invalid JSON at `{}`: {}", path.display(), source.path(), source.inner())]
    Json { path: PathBuf, source: serde_path_to_error::Error<serde_json::Error> },

    #[error("schema {}: {message}", path.display())]
    Schema { path: PathBuf, message: String },

    #[error("{}, line {line}: {message}", path.display())]
    Row { path: PathBuf, line: u64, message: String },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Core { context: &'static str, source: mfpb_core::Error },

    #[error("assertion failed: {0}")]
    Assertion(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    /// 1 for failed assertions, 2 for everything else (usage, IO, bad input).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

/// Attaches a module name to core errors.
pub(crate) trait CoreContext<T> {
    fn ctx(self, context: &'static str) -> Result<T>;
}

impl<T> CoreContext<T> for mfpb_core::Result<T> {
    fn ctx(self, context: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Core { context, source })
    }
}
