use thiserror::Error;

/// Errors raised by the statistics library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample is empty, contains non-finite values or values outside (0, 1).
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// The sample size is outside the supported range of a method.
    #[error("sample size {n} out of range: {reason}")]
    SizeOutOfRange { n: usize, reason: String },

    /// A numerical routine failed to converge or produced a non-finite result.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Malformed input file or record.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
