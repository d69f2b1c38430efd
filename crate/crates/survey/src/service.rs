//! HTTP routes over a [`SurveyStore`].

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::header;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use colordiff_core::evaluation::Mode;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::error::{Result, SurveyError};
use crate::store::{load_dataset_dir, PairView, Submission, SurveyStore};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub dataset_dir: PathBuf,
    /// Static UI assets served at `/`, when present.
    pub static_dir: Option<PathBuf>,
}

pub type SharedStore = Arc<Mutex<SurveyStore>>;

pub fn open_store(cfg: &ServiceConfig) -> Result<SurveyStore> {
    let datasets = load_dataset_dir(&cfg.dataset_dir)?;
    if datasets.is_empty() {
        return Err(SurveyError::Config(format!("no *.csv datasets in {}", cfg.dataset_dir.display())));
    }
    SurveyStore::open(&cfg.data_dir, datasets)
}

fn lock(store: &SharedStore) -> std::sync::MutexGuard<'_, SurveyStore> {
    // a panic while holding the lock cannot leave a half-written record: the
    // log is appended before in-memory state changes
    store.lock().unwrap_or_else(|e| e.into_inner())
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    mode: Mode,
    dataset: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Debug, Deserialize)]
struct DatasetQuery {
    dataset: String,
}

async fn create_session(State(store): State<SharedStore>, Json(req): Json<CreateSession>) -> Result<Json<Value>> {
    let created = lock(&store).create_session(req.mode, &req.dataset, req.seed, req.label)?;
    Ok(Json(json!(created)))
}

async fn next_stimulus(State(store): State<SharedStore>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>> {
    Ok(Json(match lock(&store).next_stimulus(&id)? {
        Some(s) => json!(s),
        None => json!({ "done": true }),
    }))
}

async fn submit(
    State(store): State<SharedStore>,
    UrlPath(id): UrlPath<String>,
    Json(sub): Json<Submission>,
) -> Result<Json<Value>> {
    Ok(Json(json!(lock(&store).submit(&id, sub)?)))
}

async fn aggregate(State(store): State<SharedStore>, Query(q): Query<DatasetQuery>) -> Result<Json<Value>> {
    let agg = lock(&store).aggregate(&q.dataset)?;
    let mut body = json!(agg);
    body["dataset"] = json!(q.dataset);
    Ok(Json(body))
}

async fn export(State(store): State<SharedStore>, Query(q): Query<DatasetQuery>) -> Result<Response> {
    let store = lock(&store);
    store.dataset(&q.dataset)?;
    let body = store.export(&q.dataset)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

async fn dataset(State(store): State<SharedStore>, Query(q): Query<DatasetQuery>) -> Result<Json<Value>> {
    let store = lock(&store);
    let ds = store.dataset(&q.dataset)?;
    let pairs: Vec<PairView> = ds.data.pairs.iter().map(PairView::from).collect();
    Ok(Json(json!({
        "dataset": ds.name,
        "source": ds.data.source,
        "display": ds.display,
        "pairs": pairs,
    })))
}

async fn datasets(State(store): State<SharedStore>) -> Json<Value> {
    let store = lock(&store);
    let list: Vec<Value> =
        store.datasets().map(|d| json!({ "dataset": d.name, "pairs": d.data.pairs.len(), "source": d.data.source })).collect();
    Json(json!(list))
}

pub fn router(store: SharedStore, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/:id/next", get(next_stimulus))
        .route("/api/sessions/:id/judgments", post(submit))
        .route("/api/aggregate", get(aggregate))
        .route("/api/export", get(export))
        .route("/api/dataset", get(dataset))
        .route("/api/datasets", get(datasets))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until `shutdown` resolves, then flushes the logs.
pub async fn serve(
    listener: TcpListener,
    store: SharedStore,
    static_dir: Option<PathBuf>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<()> {
    let app = router(store.clone(), static_dir.as_deref());
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| SurveyError::Http(e.to_string()))?;
    lock(&store).flush()
}

/// Binds `addr`, opens the store and serves until `shutdown` resolves.
pub async fn run(
    addr: SocketAddr,
    cfg: ServiceConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<()> {
    let store = Arc::new(Mutex::new(open_store(&cfg)?));
    let listener = TcpListener::bind(addr).await.map_err(|e| SurveyError::Http(format!("bind {addr}: {e}")))?;
    tracing::info!(addr = %listener.local_addr().map(|a| a.to_string()).unwrap_or_default(), "survey service listening");
    serve(listener, store, cfg.static_dir, shutdown).await
}
