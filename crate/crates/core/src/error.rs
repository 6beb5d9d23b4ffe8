use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unstable system: E[B] = {mean_size} >= E[A] = {mean_interarrival}")]
    UnstableSystem {
        mean_size: f64,
        mean_interarrival: f64,
    },

    #[error("instance has no jobs")]
    EmptyInstance,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A state transition that cannot happen if events are sequenced correctly.
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("instance has {jobs} jobs, brute force supports at most {max}")]
    InstanceTooLarge { jobs: usize, max: usize },

    #[error("unknown policy `{0}` (expected srpt|fifo|ps|fb|mlf|rmlf|ermlf)")]
    UnknownPolicy(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }
}
