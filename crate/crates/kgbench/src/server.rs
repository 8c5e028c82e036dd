//! HTTP tool service.
//!
//! - `POST /search` with `{"queries": [[f32, ...], ...], "top_k": n}` returns
//!   `{"results": [[hit, ...], ...]}`, one list per query in request order.
//! - `GET /visit/{doc_id}` returns the document's markdown and image list.
//!
//! Errors are `{"error": {"code": ..., "message": ...}}` with code
//! `bad_request`, `not_found` or `over_limit`; `over_limit` also echoes the
//! limit that was exceeded.

use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use kgbench_core::retrieval::{
    build_corpus_index, file_search, file_visit, CorpusDocument, CorpusIndex, DocumentStore, RetrievalError, SearchHit,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::oneshot;

pub const DEFAULT_MAX_BATCH: usize = 64;
pub const DEFAULT_MAX_TOP_K: usize = 100;

pub struct ToolState {
    pub index: CorpusIndex,
    pub store: DocumentStore,
    pub max_batch: usize,
    pub max_top_k: usize,
}

impl ToolState {
    pub fn build(docs: &[CorpusDocument], dim: usize) -> Result<Self, RetrievalError> {
        Ok(ToolState {
            index: build_corpus_index(docs, dim)?,
            store: DocumentStore::build(docs)?,
            max_batch: DEFAULT_MAX_BATCH,
            max_top_k: DEFAULT_MAX_TOP_K,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub queries: Vec<Vec<f32>>,
    pub top_k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResponse {
    pub results: Vec<Vec<SearchHit>>,
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    OverLimit { message: String, limit: usize },
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, json!({"code": "bad_request", "message": m})),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, json!({"code": "not_found", "message": m})),
            ApiError::OverLimit { message, limit } => (
                StatusCode::PAYLOAD_TOO_LARGE,
                json!({"code": "over_limit", "message": message, "limit": limit}),
            ),
        };
        (status, Json(json!({ "error": body }))).into_response()
    }
}

/// Validates and answers a batch in process; the HTTP handler is a thin
/// wrapper around this.
pub fn search_batch(state: &ToolState, req: &SearchRequest) -> Result<SearchResponse, ApiError> {
    if req.queries.is_empty() {
        return Err(ApiError::BadRequest("`queries` is empty".into()));
    }
    if req.queries.len() > state.max_batch {
        return Err(ApiError::OverLimit {
            message: format!("{} queries exceed the batch limit", req.queries.len()),
            limit: state.max_batch,
        });
    }
    if req.top_k == 0 {
        return Err(ApiError::BadRequest("`top_k` must be positive".into()));
    }
    if req.top_k > state.max_top_k {
        return Err(ApiError::OverLimit {
            message: format!("top_k {} exceeds the limit", req.top_k),
            limit: state.max_top_k,
        });
    }
    let results = req
        .queries
        .iter()
        .enumerate()
        .map(|(i, q)| file_search(&state.index, q, req.top_k).map_err(|e| ApiError::BadRequest(format!("query {i}: {e}"))))
        .collect::<Result<_, _>>()?;
    Ok(SearchResponse { results })
}

async fn search(State(state): State<Arc<ToolState>>, body: Bytes) -> Result<Json<SearchResponse>, ApiError> {
    let req: SearchRequest = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    search_batch(&state, &req).map(Json)
}

async fn visit(State(state): State<Arc<ToolState>>, Path(doc_id): Path<String>) -> Result<Response, ApiError> {
    match file_visit(&state.store, &doc_id) {
        Ok(p) => Ok(Json(p).into_response()),
        Err(e) => Err(ApiError::NotFound(e.to_string())),
    }
}

pub fn router(state: Arc<ToolState>) -> Router {
    Router::new()
        .route("/search", post(search))
        .route("/visit/{doc_id}", get(visit))
        .with_state(state)
}

/// A server running on its own runtime thread; dropped handles shut it down.
pub struct ServerHandle {
    pub addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl ServerHandle {
    pub fn stop(mut self) -> std::io::Result<()> {
        self.shutdown_inner()
    }

    /// Blocks until the server exits on its own.
    pub fn wait(mut self) -> std::io::Result<()> {
        // Dropping the sender would trigger shutdown; hold it until exit.
        let _keep = self.shutdown.take();
        match self.thread.take() {
            Some(t) => t.join().expect("server thread panicked"),
            None => Ok(()),
        }
    }

    fn shutdown_inner(&mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().expect("server thread panicked"),
            None => Ok(()),
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.shutdown_inner();
    }
}

/// Binds `addr` (port 0 picks a free one) and serves until the handle is
/// stopped or dropped.
pub fn spawn(state: Arc<ToolState>, addr: SocketAddr, workers: usize) -> std::io::Result<ServerHandle> {
    let listener = std::net::TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(workers.max(1))
        .enable_io()
        .build()?;
    let thread = std::thread::spawn(move || {
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener)?;
            axum::serve(listener, router(state))
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await
        })
    });
    Ok(ServerHandle {
        addr,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}
