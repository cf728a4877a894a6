use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("shape mismatch in {what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {what} at position {index}")]
    NonFinite { what: String, index: usize },

    #[error("K={k} too large: 2K must not exceed n={n}")]
    KTooLarge { k: usize, n: usize },

    #[error("K must be at least 1")]
    KZero,

    #[error("distance set is empty")]
    EmptyDistanceSet,

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("parse error in {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::ShapeMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by hyperparameters rather than by the input data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::KTooLarge { .. }
                | Error::KZero
                | Error::InvalidConfig(_)
                | Error::InvalidParams(_)
        )
    }
}
