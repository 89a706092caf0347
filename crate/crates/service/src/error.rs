use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

/// An HTTP error with a stable machine-readable `code`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), field: None }
    }

    pub fn invalid_params(field: &str, message: impl Into<String>) -> Self {
        ApiError { field: Some(field.to_string()), ..Self::new(StatusCode::BAD_REQUEST, "invalid_params", message) }
    }

    pub fn invalid_json(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_json", message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id:?}"))
    }

    pub fn wrong_player(expected: usize, got: usize) -> Self {
        Self::new(StatusCode::CONFLICT, "wrong_player", format!("the outstanding query is for player {expected}, not {got}"))
    }

    pub fn disallowed_piece(piece: usize, allowed: &[usize]) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "disallowed_piece",
            format!("option {piece} is not among the allowed {allowed:?}"),
        )
    }

    pub fn stale_query(query_id: usize, current: usize) -> Self {
        Self::new(StatusCode::CONFLICT, "stale_query", format!("query {query_id} is not the outstanding query {current}"))
    }

    pub fn finished() -> Self {
        Self::new(StatusCode::CONFLICT, "session_finished", "the session has no outstanding query")
    }

    pub fn not_finished() -> Self {
        Self::new(StatusCode::CONFLICT, "not_finished", "the session is still waiting for answers")
    }

    pub fn storage(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", message)
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "code": self.code, "message": self.message });
        if let Some(f) = self.field {
            body["field"] = json!(f);
        }
        (self.status, Json(json!({ "error": body }))).into_response()
    }
}
