use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
///
/// The CLI maps [`Error::Domain`] (and malformed input files) to exit code 2
/// and [`Error::Computation`] to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input domain error: {0}")]
    Domain(String),
    #[error("computational error: {0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn computation(msg: impl Into<String>) -> Self {
        Error::Computation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Computation(_) => 3,
        }
    }
}
