//! Error type shared by all modules.

use thiserror::Error as ThisError;

/// Errors raised by numerical operations.
#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    /// Input outside the mathematical domain of the operation (poles, bad ranges).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested accuracy could not be certified.
    #[error("accuracy error: {msg} (achieved {achieved:.3e})")]
    Accuracy { msg: String, achieved: f64 },
    /// The numerical method itself broke down (e.g. a contour pinched by colliding poles).
    #[error("method error: {0}")]
    Method(String),
    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
    /// Input data failed an integrity check.
    #[error("validation error: {0}")]
    Validation(String),
    /// Filesystem failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn accuracy(msg: impl Into<String>, achieved: f64) -> Self {
        Error::Accuracy { msg: msg.into(), achieved }
    }
    pub fn method(msg: impl Into<String>) -> Self {
        Error::Method(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
