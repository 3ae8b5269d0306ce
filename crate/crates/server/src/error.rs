use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use archlib_core::exchange::ExchangeError;
use archlib_core::{Error, ErrorCode};

/// Body of every failed request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub message: String,
    pub detail: Option<Value>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                detail: None,
            },
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, ErrorCode::Validation, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, ErrorCode::NotFound, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorCode::Storage,
            message,
        )
    }
}

pub fn status_of(err: &Error) -> StatusCode {
    match err {
        Error::InvalidToken | Error::UnknownUser(_) => StatusCode::UNAUTHORIZED,
        Error::Unauthorized { .. } => StatusCode::FORBIDDEN,
        _ => match err.code() {
            ErrorCode::Validation => StatusCode::BAD_REQUEST,
            ErrorCode::Auth => StatusCode::FORBIDDEN,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::IllegalTransition | ErrorCode::Cycle | ErrorCode::Conflict => {
                StatusCode::CONFLICT
            }
            ErrorCode::Storage => StatusCode::INTERNAL_SERVER_ERROR,
        },
    }
}

fn detail_of(err: &Error) -> Option<Value> {
    match err {
        Error::Unauthorized {
            user, action, rule, ..
        } => Some(json!({ "user": user, "action": action, "rule": rule })),
        Error::IllegalTransition { state, action } => {
            Some(json!({ "state": state, "action": action }))
        }
        Error::DraftExists {
            entry,
            variant,
            version,
        } => Some(json!({ "entry": entry, "variant": variant, "version": version })),
        Error::Immutable(state) | Error::OriginNotReleased(state) => {
            Some(json!({ "state": state }))
        }
        Error::MissingPlaceholder(p) if !p.is_empty() => Some(json!({ "placeholder": p })),
        Error::Model(ExchangeError::MalformedXml { offset, .. }) => {
            Some(json!({ "offset": offset }))
        }
        Error::Model(ExchangeError::SchemaViolation { node, .. }) => Some(json!({ "node": node })),
        Error::Storage { path, .. } => Some(json!({ "path": path })),
        _ => None,
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        Self {
            status: status_of(&err),
            body: ErrorBody {
                code: err.code(),
                message: err.to_string(),
                detail: detail_of(&err),
            },
        }
    }
}

impl From<ExchangeError> for ApiError {
    fn from(err: ExchangeError) -> Self {
        Error::from(err).into()
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = %self.body.code, "{}", self.body.message);
        }
        (self.status, Json(self.body)).into_response()
    }
}
