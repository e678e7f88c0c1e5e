use thiserror::Error;

/// Errors raised by kernel evaluation, the oracles and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometry that does not determine the requested object (zero vector,
    /// antipodal directions).
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// Mixing points of different dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An oracle could not reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Invalid arguments or configuration.
    #[error("usage error: {0}")]
    Usage(String),

    /// Regime calibration could not meet its target.
    #[error("calibration failure: {0}")]
    Calibration(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
