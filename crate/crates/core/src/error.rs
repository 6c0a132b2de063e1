use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error: {0}")]
    Stream(#[from] std::io::Error),

    /// The corpus-wide male proportion is 0 or 1, so no bias is defined.
    #[error("degenerate scoring context: {0}")]
    DegenerateContext(String),

    #[error("undefined score: {0}")]
    UndefinedScore(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("undefined AUC: {0}")]
    UndefinedAuc(String),

    #[error("undefined accuracy: {0}")]
    UndefinedAccuracy(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("empty evaluable set: {0}")]
    EmptyEvaluableSet(String),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for input and configuration problems, 2 when the
    /// data is well formed but cannot support the requested statistic.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Io { .. } | Error::Stream(_) => 1,
            Error::DegenerateContext(_)
            | Error::UndefinedScore(_)
            | Error::DegenerateDistribution(_)
            | Error::UndefinedCorrelation(_)
            | Error::UndefinedAuc(_)
            | Error::UndefinedAccuracy(_)
            | Error::DegenerateSample(_)
            | Error::EmptyEvaluableSet(_) => 2,
        }
    }
}
