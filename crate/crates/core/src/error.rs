use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero-volume space")]
    ZeroVolume,

    #[error("unsupported spatial dimensionality {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected} spatial coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("empty member set")]
    EmptyCluster,

    #[error("cannot split singleton")]
    SplitSingleton,

    #[error("empty tail")]
    EmptyTail,

    #[error("empty series")]
    EmptySeries,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
