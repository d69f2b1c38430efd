use std::path::{Path, PathBuf};

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use colordiff_core::ColorError;
use thiserror::Error;

pub type Result<T, E = SurveyError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("stimulus {stimulus_id} was already answered")]
    Duplicate { stimulus_id: u32 },
    #[error("stimulus {stimulus_id} is out of order (expected {expected:?})")]
    OutOfOrder { stimulus_id: u32, expected: Option<u32> },
    #[error("response out of range: {0}")]
    Range(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("http: {0}")]
    Http(String),
}

impl SurveyError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        SurveyError::Io { path: path.to_path_buf(), source }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            SurveyError::UnknownDataset(_) | SurveyError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SurveyError::Duplicate { .. } | SurveyError::OutOfOrder { .. } => StatusCode::CONFLICT,
            SurveyError::Range(_) | SurveyError::BadRequest(_) => StatusCode::BAD_REQUEST,
            SurveyError::Color(ColorError::EmptyLog) => StatusCode::NOT_FOUND,
            SurveyError::Color(ColorError::UnknownPair(_)) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    /// Stable machine-readable error kind for clients.
    pub fn kind(&self) -> &'static str {
        match self {
            SurveyError::UnknownDataset(_) => "unknown_dataset",
            SurveyError::UnknownSession(_) => "unknown_session",
            SurveyError::Duplicate { .. } => "duplicate",
            SurveyError::OutOfOrder { .. } => "out_of_order",
            SurveyError::Range(_) => "range",
            SurveyError::BadRequest(_) => "bad_request",
            SurveyError::Color(ColorError::EmptyLog) => "empty_log",
            _ => "internal",
        }
    }
}

impl IntoResponse for SurveyError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let body = serde_json::json!({ "error": self.kind(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}
