use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain of an operation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// One or more purity inequalities failed; every violation is listed.
    #[error("spectrum violates purity: {}", .0.join("; "))]
    Purity(Vec<String>),

    /// An iterative or adaptive routine failed to reach its tolerance.
    #[error("no convergence in {routine}: {detail}")]
    Convergence { routine: &'static str, detail: String },

    /// Argument hits a pole of a gamma factor.
    #[error("gamma pole: {0}")]
    Pole(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn convergence(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            routine,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical method rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Pole(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
