use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use foodcal_core::scoring::ScoringError;
use foodcal_core::store::StoreError;

/// Machine-readable error codes; the set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    UnknownToken,
    AgeOutOfRange,
    IllegalPick,
    VersionConflict,
    NotFound,
    BadRequest,
    StorageUnavailable,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::UnknownToken => StatusCode::UNAUTHORIZED,
            ErrorCode::AgeOutOfRange | ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::IllegalPick => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::VersionConflict => StatusCode::CONFLICT,
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::StorageUnavailable => StatusCode::SERVICE_UNAVAILABLE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub http_status: StatusCode,
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            http_status: code.status(),
            code,
            message: message.into(),
        }
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new(ErrorCode::NotFound, what)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn unknown_token() -> Self {
        Self::new(ErrorCode::UnknownToken, "missing or unknown player token")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.http_status, Json(self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownToken => ApiError::unknown_token(),
            StoreError::VersionConflict { .. } => ApiError::new(ErrorCode::VersionConflict, e.to_string()),
            StoreError::StorageUnavailable(_) => {
                ApiError::new(ErrorCode::StorageUnavailable, "profile storage is unavailable")
            }
        }
    }
}

impl From<ScoringError> for ApiError {
    fn from(e: ScoringError) -> Self {
        match e {
            ScoringError::IllegalPick { .. } => ApiError::new(ErrorCode::IllegalPick, e.to_string()),
            ScoringError::LevelMismatch { .. } => ApiError::bad_request(e.to_string()),
            ScoringError::UnknownItem(_) => ApiError::new(ErrorCode::StorageUnavailable, e.to_string()),
        }
    }
}
