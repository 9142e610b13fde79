use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate length {0}: must be positive")]
    DegenerateLength(f64),

    #[error("curve set is empty")]
    EmptyCurveSet,

    #[error("invalid curve {curve}: {reason}")]
    InvalidCurve { curve: usize, reason: String },

    #[error("plant is disconnected: curve(s) {curves:?} unreachable from the root under sigma_connect")]
    DisconnectedPlant { curves: Vec<usize> },

    #[error("invalid plant graph: {0}")]
    InvalidGraph(String),

    #[error("unknown leaf template `{0}`")]
    UnknownLeafTemplate(String),

    #[error("simulation aborted at step {step}: non-finite state ({worst})")]
    NonFinite { step: u64, worst: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("config error: {0}")]
    Config(String),

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
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
