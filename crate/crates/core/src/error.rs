use thiserror::Error;

/// Errors raised by the library.
///
/// The split between [`Error::InvalidInput`] and [`Error::Computation`] is
/// what the command-line front end maps to exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("computation failed: {0}")]
    Computation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn computation(msg: impl Into<String>) -> Self {
        Error::Computation(msg.into())
    }

    /// True for errors caused by the caller's data rather than by a solver.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Computation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
