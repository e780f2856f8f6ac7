//! JSON service: `POST /api/analyze` and `GET /api/health`.

use axum::body::Bytes;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use powerkit::{Error, ENGINE_VERSION};
use serde_json::json;

use crate::api::{analyze, AnalyzeRequest};

pub fn router() -> Router {
    Router::new()
        .route("/api/analyze", post(analyze_handler))
        .route("/api/health", get(health))
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "engine_version": ENGINE_VERSION }))
}

fn error_response(status: StatusCode, kind: &str, message: String) -> Response {
    let body = json!({
        "engine_version": ENGINE_VERSION,
        "error": { "kind": kind, "message": message },
    });
    (status, Json(body)).into_response()
}

/// HTTP status for an engine error.
pub fn status_for(err: &Error) -> StatusCode {
    match err {
        Error::NonConvergence { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

async fn analyze_handler(body: Bytes) -> Response {
    let req: AnalyzeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()),
    };
    let outcome = tokio::task::spawn_blocking(move || analyze(&req)).await;
    match outcome {
        Ok(Ok(resp)) => (StatusCode::OK, Json(resp)).into_response(),
        Ok(Err(e)) => error_response(status_for(&e), "engine", e.to_string()),
        Err(join) => error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal", join.to_string()),
    }
}
