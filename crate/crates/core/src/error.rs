use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncation interval is too narrow to hold a representable value.
    #[error("degenerate interval ({lo}, {hi}) at position {index:?}")]
    Degenerate {
        lo: f64,
        hi: f64,
        index: Option<usize>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The chain cannot be started from the supplied labels and prior.
    #[error("infeasible initialization: {0}")]
    InfeasibleInit(String),

    /// Malformed input text. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A configuration file violates its schema.
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
