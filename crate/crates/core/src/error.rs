use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the reconstruction library.
#[derive(Debug, Error)]
pub enum Error {
    /// A free-space kernel was evaluated at coincident points.
    #[error("kernel is singular at coincident points (|x - y| = {distance:e})")]
    Coincident { distance: f64 },

    /// A configuration value failed validation. `field` is the dotted path of
    /// the offending entry, e.g. `surface.radius`.
    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A sampling point is too close to the measurement surface for a kernel
    /// that blows up there.
    #[error("sampling point ({x:.4}, {y:.4}, {z:.4}) is within {tolerance:.4e} of the measurement surface")]
    NearSurface {
        x: f64,
        y: f64,
        z: f64,
        tolerance: f64,
    },

    /// Persisted data is malformed or does not match the configuration.
    #[error("data format: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid user input rather than by the
    /// environment (I/O) at run time.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Argument(_) | Error::Format(_) | Error::NearSurface { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
