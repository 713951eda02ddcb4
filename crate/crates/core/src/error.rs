use std::path::PathBuf;

/// Errors produced by curve construction, solving and analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input violates a precondition (bad parameter, too few samples, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// The closure integral has no sign change in the searched range.
    #[error("no closure in range: {0}")]
    NoRoot(String),

    /// An iterative or extrapolated quantity failed to settle.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse { .. } => 2,
            Error::NoRoot(_) => 3,
            Error::NonConvergence(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
