use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid UTF-8 on line {line}")]
    Utf8 { line: usize },

    #[error("SGML parse error at byte {offset}: {message}")]
    Sgml { offset: usize, message: String },

    #[error("duplicate document number `{0}`")]
    DuplicateDocno(String),

    #[error("index file: {0}")]
    IndexFormat(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate query id `{0}`")]
    DuplicateQid(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Whether the error stems from caller-supplied parameters rather than data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parameter(_))
    }
}
