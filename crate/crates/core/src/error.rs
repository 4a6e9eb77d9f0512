use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or structural parameter is outside its admissible range.
    #[error("invalid `{field}`: {reason}")]
    Domain { field: String, reason: String },

    /// A numerical contract (eigensolver residual, orthogonality, ...) was not met.
    #[error("numeric contract violated: {what} (residual {residual:.3e})")]
    Numeric { what: String, residual: f64 },

    /// Configuration could not be parsed or failed validation.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// A sweep point failed; the inner error carries the cause.
    #[error("sweep point {index}: {source}")]
    SweepPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Config { .. } => 2,
            Error::Numeric { .. } => 3,
            Error::Io { .. } => 4,
            Error::SweepPoint { source, .. } => source.exit_code(),
        }
    }
}
