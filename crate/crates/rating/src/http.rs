//! JSON API over [`RatingStore`].
//!
//! | route | who |
//! |---|---|
//! | `GET /api/next?cursor=` | any rater |
//! | `POST /api/ratings` | any rater |
//! | `GET /api/agreement` | any rater |
//! | `GET /api/export?format=json\|csv\|sidecar-csv` | adjudicators |
//!
//! Requests authenticate with `Authorization: Bearer <token>`. Every error
//! is a JSON object `{code, message}` with a matching status.

use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::config::Role;
use crate::service::{Acknowledgment, AgreementReport, GroundTruthExport, NextBatch, SubmitRequest};
use crate::store::RatingStore;
use crate::RatingError;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    store: Arc<Mutex<RatingStore>>,
    clock: Clock,
}

impl AppState {
    pub fn new(store: RatingStore) -> Self {
        Self {
            store: Arc::new(Mutex::new(store)),
            clock: Arc::new(Utc::now),
        }
    }

    /// Replaces the timestamp source for new records.
    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn store(&self) -> Arc<Mutex<RatingStore>> {
        Arc::clone(&self.store)
    }

    fn lock(&self) -> Result<MutexGuard<'_, RatingStore>, RatingError> {
        self.store.lock().map_err(|_| RatingError::Io("rating state lock poisoned".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl IntoResponse for RatingError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = ErrorBody {
            code: self.code().to_string(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

/// The API routes; with `ui_dir`, other paths serve static files from it.
pub fn router(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/next", get(next))
        .route("/ratings", post(submit))
        .route("/agreement", get(agreement))
        .route("/export", get(export))
        .fallback(|| async { RatingError::NotFound("no such endpoint".into()) });
    let app = Router::new().nest("/api", api).with_state(state);
    match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async { RatingError::NotFound("no such endpoint".into()) }),
    }
}

pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> io::Result<()> {
    axum::serve(listener, app).await
}

fn bearer(headers: &HeaderMap) -> Result<&str, RatingError> {
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .ok_or(RatingError::Unauthorized)
}

fn rater_id(store: &RatingStore, headers: &HeaderMap) -> Result<String, RatingError> {
    Ok(store.service().authenticate(bearer(headers)?)?.id.clone())
}

#[derive(Debug, Deserialize)]
struct NextQuery {
    cursor: Option<String>,
}

async fn next(
    State(state): State<AppState>,
    headers: HeaderMap,
    query: Result<Query<NextQuery>, QueryRejection>,
) -> Result<Json<NextBatch>, RatingError> {
    let Query(q) = query.map_err(|e| RatingError::Validation(e.body_text()))?;
    let store = state.lock()?;
    let rater = rater_id(&store, &headers)?;
    Ok(Json(store.service().next_batch(&rater, q.cursor.as_deref())?))
}

async fn submit(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<Acknowledgment>, RatingError> {
    let mut store = state.lock()?;
    let rater = rater_id(&store, &headers)?;
    let request: SubmitRequest =
        serde_json::from_slice(&body).map_err(|e| RatingError::Validation(format!("malformed rating: {e}")))?;
    Ok(Json(store.submit(&rater, &request, (state.clock)())?))
}

async fn agreement(State(state): State<AppState>, headers: HeaderMap) -> Result<Json<AgreementReport>, RatingError> {
    let store = state.lock()?;
    rater_id(&store, &headers)?;
    Ok(Json(store.service().agreement()))
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

async fn export(
    State(state): State<AppState>,
    headers: HeaderMap,
    query: Result<Query<ExportQuery>, QueryRejection>,
) -> Result<Response, RatingError> {
    let Query(q) = query.map_err(|e| RatingError::Validation(e.body_text()))?;
    let store = state.lock()?;
    let token = bearer(&headers)?;
    let rater = store.service().authenticate(token)?;
    if !rater.roles.contains(&Role::Adjudicator) {
        return Err(RatingError::Forbidden("export requires the adjudicator role".into()));
    }
    let export: GroundTruthExport = store.service().export();
    let csv = |text: String| ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], text).into_response();
    match q.format.as_deref().unwrap_or("json") {
        "json" => Ok(Json(export).into_response()),
        "csv" => Ok(csv(export.rows_csv()?)),
        "sidecar-csv" => Ok(csv(export.excluded_csv()?)),
        other => Err(RatingError::Validation(format!(
            "unknown export format {other:?}; expected json, csv or sidecar-csv"
        ))),
    }
}
