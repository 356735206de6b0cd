use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("shooting bracket does not separate outcomes: {0}")]
    Bracket(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
