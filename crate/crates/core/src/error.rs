use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),

    #[error("invalid power shaping: {0}")]
    InvalidShaping(String),

    #[error("invalid data file {path}: {reason}")]
    DataFile { path: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("matrix is numerically singular: condition number {condition:.3e} exceeds {limit:.0e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("target not bracketed by the sweep: {0}")]
    NotBracketed(String),

    #[error("BER curve is not monotone: {0}")]
    NonMonotone(String),

    #[error("plot error: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
