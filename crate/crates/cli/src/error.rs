use std::path::{Path, PathBuf};

/// Process exit status for a failed command.
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: arir::Error },
    #[error("{path}:{line}: {message}", path = path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] arir::Error),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// Wraps an engine error with the file it came from.
    pub fn file(path: &Path, source: impl Into<arir::Error>) -> Self {
        Self::File {
            path: path.to_owned(),
            source: source.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) | CliError::File { source: e, .. } if e.is_usage() => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
