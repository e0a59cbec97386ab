use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The solver cost rose by more than the allowed slack. Carries the trace up to the failing step.
    #[error("cost increased from {previous} to {current} at iteration {iteration}")]
    Divergence {
        iteration: usize,
        previous: f64,
        current: f64,
        trace: Vec<f64>,
    },

    #[error("{candidates} block supports exceed the enumeration limit of {limit}")]
    TooManyCandidates { candidates: u128, limit: u128 },

    #[error("index {index} out of range for {len} classes")]
    Index { index: usize, len: usize },

    #[error("feature extractor used before fitting")]
    NotFitted,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
