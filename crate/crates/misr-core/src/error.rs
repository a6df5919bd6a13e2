//! Error type shared across the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two images (or an image and an operator) disagree on dimensions.
    DimensionMismatch(String),
    /// A parameter is outside its valid range.
    InvalidParam(String),
    /// File exists but its contents are not a supported format.
    MalformedFile(String),
    /// Format is recognized but uses an unsupported variant (bit depth, color type).
    UnsupportedFormat(String),
    /// Underlying I/O failure.
    Io(String),
    /// The iterative solver produced non-finite values or blew up.
    Divergence { iteration: usize, detail: String },
    /// A brute-force construction was asked for a problem too large to enumerate.
    SizeGuard(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {}", msg),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {}", msg),
            Error::MalformedFile(msg) => write!(f, "malformed file: {}", msg),
            Error::UnsupportedFormat(msg) => write!(f, "unsupported format: {}", msg),
            Error::Io(msg) => write!(f, "i/o error: {}", msg),
            Error::Divergence { iteration, detail } => {
                write!(f, "solver diverged at iteration {}: {}", iteration, detail)
            }
            Error::SizeGuard(msg) => write!(f, "size guard exceeded: {}", msg),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
