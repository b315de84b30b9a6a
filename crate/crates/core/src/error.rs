use std::path::PathBuf;

/// Errors raised by the library.
///
/// Hypothesis failures of the inequality checks are not errors; they are
/// reported inside the check results so that a run can record them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("grid too coarse: {m} cells, need at least {min}")]
    Resolution { m: usize, min: usize },
    #[error("time {t} is at or past the singular time {t_sing}")]
    PastSingularity { t: f64, t_sing: f64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid test field: {0}")]
    InvalidTestField(String),
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
