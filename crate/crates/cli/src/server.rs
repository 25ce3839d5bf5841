//! HTTP session service.
//!
//! Each session holds the current seed and a stack of earlier seeds; undo
//! pops the stack and never re-mutates. Requests on one session are
//! serialized by a per-session lock, distinct sessions run concurrently.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use supercluster::quiver::Allowedness;
use supercluster::render::Style;
use supercluster::seed::{QuantumSeed, SeedError};
use tokio::sync::{Mutex, RwLock};

use crate::input::parse_source;

/// Stored session: current seed plus the snapshots it replaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionState {
    pub id: String,
    pub seed: QuantumSeed,
    pub history: Vec<QuantumSeed>,
}

/// What clients see: the seed, the mutation path and per-vertex allowedness.
#[derive(Debug, Serialize)]
pub struct SessionView<'a> {
    pub id: &'a str,
    pub state: StateView<'a>,
}

#[derive(Debug, Serialize)]
pub struct StateView<'a> {
    pub seed: &'a QuantumSeed,
    pub depth: usize,
    pub path: Vec<usize>,
    pub vertices: Vec<Allowedness>,
}

impl SessionState {
    pub fn view(&self) -> SessionView<'_> {
        let q = self.seed.quiver();
        SessionView {
            id: &self.id,
            state: StateView {
                seed: &self.seed,
                depth: self.history.len(),
                path: self.seed.trace().iter().map(|t| t.vertex).collect(),
                vertices: (0..q.n() + q.m())
                    .map(|k| {
                        if k < q.n() {
                            q.allowedness(k)
                        } else {
                            Allowedness {
                                vertex: k + 1,
                                frozen: true,
                                allowed_def: false,
                                allowed_lemma: false,
                                checks: Vec::new(),
                            }
                        }
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Default)]
struct Inner {
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
    state_dir: Option<PathBuf>,
}

#[derive(Clone, Default)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    /// Loads every `*.json` snapshot found in `state_dir`; unreadable files are skipped.
    pub fn new(state_dir: Option<PathBuf>) -> std::io::Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &state_dir {
            std::fs::create_dir_all(dir)?;
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    match std::fs::read_to_string(&path).map(|t| serde_json::from_str::<SessionState>(&t)) {
                        Ok(Ok(s)) => {
                            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
                        }
                        _ => eprintln!("warning: skipping unreadable snapshot {}", path.display()),
                    }
                }
            }
        }
        Ok(Self { inner: Arc::new(Inner { sessions: RwLock::new(sessions), state_dir }) })
    }

    async fn get(&self, id: &str) -> Result<Arc<Mutex<SessionState>>, ApiError> {
        self.inner.sessions.read().await.get(id).cloned().ok_or(ApiError::NotFound)
    }

    fn snapshot(&self, s: &SessionState) -> Result<(), ApiError> {
        let Some(dir) = &self.inner.state_dir else {
            return Ok(());
        };
        write_snapshot(dir, s).map_err(|e| ApiError::Internal(e.to_string()))
    }
}

fn write_snapshot(dir: &Path, s: &SessionState) -> std::io::Result<()> {
    let tmp = dir.join(format!("{}.json.tmp", s.id));
    std::fs::write(&tmp, serde_json::to_vec_pretty(s).expect("serializable"))?;
    std::fs::rename(tmp, dir.join(format!("{}.json", s.id)))
}

#[derive(Debug)]
pub enum ApiError {
    NotFound,
    Conflict(Value),
    Unprocessable(Value),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, json!({"error": "not_found"})),
            ApiError::Conflict(v) => (StatusCode::CONFLICT, v),
            ApiError::Unprocessable(v) => (StatusCode::UNPROCESSABLE_ENTITY, v),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": "internal", "message": m})),
        };
        (status, Json(body)).into_response()
    }
}

fn malformed(message: impl ToString) -> ApiError {
    ApiError::Unprocessable(json!({"error": "malformed", "message": message.to_string()}))
}

fn respond(s: &SessionState) -> Response {
    Json(s.view()).into_response()
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn create(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(malformed)?;
    let src = parse_source("body", text).map_err(malformed)?;
    let seed = src.into_seed(None).map_err(|e| match e {
        SeedError::Incompatible(report) => ApiError::Unprocessable(json!({"error": "incompatible", "report": report})),
        other => malformed(other),
    })?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = SessionState { id: id.clone(), seed, history: Vec::new() };
    app.snapshot(&session)?;
    let resp = (StatusCode::CREATED, Json(session.view())).into_response();
    app.inner.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
    Ok(resp)
}

async fn show(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let s = app.get(&id).await?;
    let s = s.lock().await;
    Ok(respond(&s))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MutateBody {
    vertex: usize,
}

async fn mutate(State(app): State<AppState>, UrlPath(id): UrlPath<String>, body: Bytes) -> Result<Response, ApiError> {
    let s = app.get(&id).await?;
    let MutateBody { vertex } = serde_json::from_slice(&body).map_err(malformed)?;
    let mut s = s.lock().await;
    let dim = s.seed.torus().shape().dim();
    if vertex == 0 || vertex > dim {
        return Err(malformed(format!("vertex {vertex} out of range 1..={dim}")));
    }
    let current = s.seed.clone();
    let result = tokio::task::spawn_blocking(move || current.mutate(vertex - 1))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let next = result.map_err(|e| match e {
        SeedError::Frozen { vertex } => ApiError::Conflict(json!({
            "error": "not_allowed",
            "reason": "frozen",
            "vertex": vertex,
            "message": "odd coordinates and frozen even vertices are frozen",
        })),
        SeedError::NotAllowed(a) => ApiError::Conflict(json!({
            "error": "not_allowed",
            "reason": "not-allowed",
            "vertex": a.vertex,
            "analysis": a,
        })),
        e @ SeedError::NotDivisible { .. } => ApiError::Conflict(json!({
            "error": "not_divisible",
            "reason": "not-divisible",
            "vertex": vertex,
            "message": e.to_string(),
        })),
        other => ApiError::Conflict(json!({"error": "mutation_failed", "message": other.to_string()})),
    })?;
    let prev = std::mem::replace(&mut s.seed, next);
    s.history.push(prev);
    if let Err(e) = app.snapshot(&s) {
        let prev = s.history.pop().expect("just pushed");
        s.seed = prev;
        return Err(e);
    }
    Ok(respond(&s))
}

async fn undo(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let s = app.get(&id).await?;
    let mut s = s.lock().await;
    let Some(prev) = s.history.pop() else {
        return Err(ApiError::Conflict(json!({"error": "empty_history", "reason": "empty-history"})));
    };
    let undone = std::mem::replace(&mut s.seed, prev);
    if let Err(e) = app.snapshot(&s) {
        let restored = std::mem::replace(&mut s.seed, undone);
        s.history.push(restored);
        return Err(e);
    }
    Ok(respond(&s))
}

#[derive(Deserialize)]
struct VariablesQuery {
    #[serde(default)]
    format: Option<String>,
}

async fn variables(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<VariablesQuery>,
) -> Result<Response, ApiError> {
    let style = match q.format.as_deref() {
        None | Some("pretty") => Style::Pretty,
        Some("latex") => Style::Latex,
        Some(other) => return Err(malformed(format!("unknown format {other:?}"))),
    };
    let s = app.get(&id).await?;
    let s = s.lock().await;
    let vars: Vec<Value> = s
        .seed
        .render_vars(style)
        .into_iter()
        .enumerate()
        .map(|(i, text)| json!({"index": i + 1, "text": text}))
        .collect();
    Ok(Json(json!({"format": style, "variables": vars})).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/variables", get(variables))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state_dir: Option<PathBuf>) -> std::io::Result<()> {
    let app = router(AppState::new(state_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
