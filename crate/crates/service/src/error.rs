use axum::extract::rejection::{JsonRejection, PathRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cycles_core::MoveError;
use serde::Serialize;

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<&'static str>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub rule: Option<&'static str>,
    pub message: String,
}

impl ApiError {
    pub fn not_found(what: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::NOT_FOUND, rule: None, message: what.into() }
    }

    pub fn unprocessable(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, rule: None, message: message.into() }
    }

    pub fn conflict(rule: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::CONFLICT, rule: Some(rule), message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, rule: None, message: message.into() }
    }
}

impl From<MoveError> for ApiError {
    fn from(e: MoveError) -> ApiError {
        match e {
            // a move naming a missing edge or wrong endpoints is a bad request body
            MoveError::UnknownEdge(_) | MoveError::NotEndpoints { .. } => {
                ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, rule: Some(e.rule()), message: e.to_string() }
            }
            _ => ApiError::conflict(e.rule(), e.to_string()),
        }
    }
}

// Every body problem (syntax, shape, content type) is a 422.
impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> ApiError {
        ApiError::unprocessable(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> ApiError {
        ApiError::not_found(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message, rule: self.rule })).into_response()
    }
}
