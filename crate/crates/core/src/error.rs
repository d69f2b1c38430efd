use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ColorError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ColorError {
    #[error("cannot parse color `{0}` (expected #RRGGBB or r,g,b)")]
    Parse(String),
    #[error("unknown color space `{0}`")]
    UnknownSpace(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("unknown metric `{id}` (available: {available})")]
    UnknownMetric { id: String, available: String },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: image has no pixels")]
    EmptyImage { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{location}: {message}")]
    Dataset { location: String, message: String },
    #[error("duplicate pair id {0}")]
    DuplicatePair(u32),
    #[error("unknown pair id {0}")]
    UnknownPair(u32),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("normalization undefined: {0}")]
    UndefinedScaling(String),
    #[error("no judgments recorded")]
    EmptyLog,
}

impl ColorError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ColorError::Io { path: path.into(), source }
    }
}
