//! HTTP/JSON facade over sessions.
//!
//! Routes:
//! - `POST /sessions` creates a session from inline graph and pattern text.
//! - `POST /sessions/{id}/updates` applies one update set.
//! - `GET /sessions/{id}`, `/teams`, `/pattern`, `/stats` return views.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use teamsim_core::{PatternError, QueryResult};

use crate::names::Labels;
use crate::session::{Session, SessionConfig, SessionError};
use crate::text::{parse_graph, parse_pattern, parse_unit_lines, ParseError, UpdateSet};

/// One session plus the flag that serializes update sets.
pub struct SessionSlot {
    pub busy: AtomicBool,
    pub session: RwLock<Session>,
}

#[derive(Default)]
pub struct AppState {
    next_id: AtomicU64,
    sessions: RwLock<HashMap<u64, Arc<SessionSlot>>>,
}

impl AppState {
    pub fn slot(&self, id: u64) -> Option<Arc<SessionSlot>> {
        self.sessions.read().expect("session table").get(&id).cloned()
    }
}

pub type SharedState = Arc<AppState>;

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_summary))
        .route("/sessions/{id}/updates", post(apply_updates))
        .route("/sessions/{id}/teams", get(session_teams))
        .route("/sessions/{id}/pattern", get(session_pattern))
        .route("/sessions/{id}/stats", get(session_stats))
        .with_state(state)
}

/// Binds `addr` and serves until the process ends.
pub fn serve(addr: &str) -> std::io::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, router(SharedState::default())).await
    })
}

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn parse(what: &str, e: &ParseError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": format!("{what}: {}", e.message), "source": what, "line": e.line, "column": e.column }),
        }
    }

    fn not_found(id: u64) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Parse(p) => ApiError::parse("input", &p),
            other => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, other.to_string()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateRequest {
    /// Graph text in the `node`/`edge` grammar.
    #[serde(default)]
    pub graph: Option<String>,
    /// Server-side path to a graph file, used when `graph` is absent.
    #[serde(default)]
    pub graph_path: Option<String>,
    pub pattern: String,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_h")]
    pub h: usize,
    #[serde(default = "default_true")]
    pub early_return: bool,
}

fn default_r() -> u32 {
    2
}
fn default_k() -> usize {
    10
}
fn default_h() -> usize {
    3
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UpdateRequest {
    /// Pattern unit lines such as `p-edge u1 u2`.
    #[serde(default)]
    pub pattern: Vec<String>,
    /// Data unit lines such as `g+edge 14 27`.
    #[serde(default)]
    pub data: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct StatsJson {
    affected_balls: usize,
    structural_balls: usize,
    balls_visited: usize,
    balls_combined: usize,
    relations_recomputed: usize,
    relations_incremental: usize,
    balls_created: usize,
    balls_retired: usize,
    emit_ms: f64,
    total_ms: f64,
}

fn result_json(session: &Session, result: &QueryResult) -> Value {
    let s = &result.stats;
    let stats = StatsJson {
        affected_balls: s.affected_balls,
        structural_balls: s.structural_balls,
        balls_visited: s.balls_visited,
        balls_combined: s.balls_combined,
        relations_recomputed: s.relations_recomputed,
        relations_incremental: s.relations_incremental,
        balls_created: s.balls_created,
        balls_retired: s.balls_retired,
        emit_ms: s.emit_nanos as f64 / 1e6,
        total_ms: s.total_nanos as f64 / 1e6,
    };
    json!({
        "satisfiable": result.satisfiable,
        "earlyReturned": result.early_returned,
        "affectedBalls": s.affected_balls,
        "teams": session.teams_json(false),
        "stats": stats,
    })
}

async fn create_session(State(state): State<SharedState>, Json(req): Json<CreateRequest>) -> Result<Response, ApiError> {
    let graph_text = match (&req.graph, &req.graph_path) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("{path}: {e}")))?,
        (None, None) => return Err(ApiError::new(StatusCode::BAD_REQUEST, "one of graph or graphPath is required")),
    };
    let built = tokio::task::spawn_blocking(move || -> Result<Session, ApiError> {
        let mut labels = Labels::new();
        let doc = parse_graph(&graph_text, &mut labels).map_err(|e| ApiError::parse("graph", &e))?;
        let pattern = parse_pattern(&req.pattern, &mut labels).map_err(|e| ApiError::parse("pattern", &e))?;
        if let Err(e) = pattern.validate() {
            let status = match e {
                PatternError::Disconnected | PatternError::Empty => StatusCode::UNPROCESSABLE_ENTITY,
                _ => StatusCode::BAD_REQUEST,
            };
            return Err(ApiError::new(status, e.to_string()));
        }
        let cfg = SessionConfig {
            r: req.r,
            k: req.k,
            h: req.h,
            early_return: req.early_return,
            parallel: false,
        };
        Session::new(doc, pattern, labels, cfg).map_err(ApiError::from)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;

    let id = state.next_id.fetch_add(1, Ordering::SeqCst) + 1;
    let satisfiable = built.engine().is_satisfiable();
    let body = json!({
        "id": id,
        "satisfiable": satisfiable,
        "teams": built.teams_json(false),
    });
    state.sessions.write().expect("session table").insert(
        id,
        Arc::new(SessionSlot {
            busy: AtomicBool::new(false),
            session: RwLock::new(built),
        }),
    );
    let status = if satisfiable { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(body)).into_response())
}

fn parse_lines(lines: &[String], what: &str, pattern_side: bool) -> Result<UpdateSet, ApiError> {
    let set = parse_unit_lines(lines.iter().map(String::as_str)).map_err(|e| ApiError::parse(what, &e))?;
    if let Some(i) = set.units.iter().position(|u| u.is_pattern() != pattern_side) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("{what}[{i}] is not a {what} update")));
    }
    Ok(set)
}

struct BusyGuard(Arc<SessionSlot>);

impl Drop for BusyGuard {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::SeqCst);
    }
}

async fn apply_updates(
    State(state): State<SharedState>,
    Path(id): Path<u64>,
    Json(req): Json<UpdateRequest>,
) -> Result<Json<Value>, ApiError> {
    let slot = state.slot(id).ok_or_else(|| ApiError::not_found(id))?;
    let mut set = parse_lines(&req.pattern, "pattern", true)?;
    set.units.extend(parse_lines(&req.data, "data", false)?.units);
    if slot.busy.swap(true, Ordering::SeqCst) {
        return Err(ApiError::new(StatusCode::CONFLICT, "another update set is in flight"));
    }
    let guard = BusyGuard(slot);
    tokio::task::spawn_blocking(move || {
        let mut session = guard.0.session.write().expect("session lock");
        let result = session.apply(&set)?;
        Ok(Json(result_json(&session, &result)))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn with_session<T>(state: &AppState, id: u64, f: impl FnOnce(&Session) -> T) -> Result<T, ApiError> {
    let slot = state.slot(id).ok_or_else(|| ApiError::not_found(id))?;
    let session = slot.session.read().expect("session lock");
    Ok(f(&session))
}

async fn session_summary(State(state): State<SharedState>, Path(id): Path<u64>) -> Result<Json<Value>, ApiError> {
    with_session(&state, id, |s| {
        let e = s.engine();
        Json(json!({
            "id": id,
            "r": e.radius(),
            "k": e.k(),
            "h": e.fragmentation().h(),
            "satisfiable": e.is_satisfiable(),
            "nodes": e.graph().node_count(),
            "edges": e.graph().edge_count(),
            "teams": e.topk().len(),
        }))
    })
}

async fn session_teams(State(state): State<SharedState>, Path(id): Path<u64>) -> Result<Json<Value>, ApiError> {
    with_session(&state, id, |s| {
        Json(json!({
            "satisfiable": s.engine().is_satisfiable(),
            "teams": s.teams_json(true),
        }))
    })
}

async fn session_pattern(State(state): State<SharedState>, Path(id): Path<u64>) -> Result<Json<Value>, ApiError> {
    with_session(&state, id, |s| {
        let p = s.engine().pattern();
        let nodes: Vec<Value> = p
            .nodes()
            .map(|(u, n)| {
                json!({
                    "name": n.name,
                    "label": s.labels().name(n.label),
                    "capacity": { "lower": n.capacity.lower(), "upper": n.capacity.upper() },
                    "fragment": s.engine().fragmentation().fragment_of(u),
                })
            })
            .collect();
        let name = |u| p.node(u).map(|n| n.name.clone()).unwrap_or_default();
        let edges: Vec<[String; 2]> = p.edges().map(|(a, b)| [name(a), name(b)]).collect();
        Json(json!({
            "nodes": nodes,
            "edges": edges,
            "text": crate::text::write_pattern(p, s.labels()),
        }))
    })
}

async fn session_stats(State(state): State<SharedState>, Path(id): Path<u64>) -> Result<Json<Value>, ApiError> {
    with_session(&state, id, |s| {
        let t = s.engine().totals();
        let last = s.last().map(|r| result_json(s, r)["stats"].clone());
        Json(json!({
            "updateSets": t.update_sets,
            "patternUnits": t.pattern_units,
            "dataUnits": t.data_units,
            "affectedBalls": t.affected_balls,
            "ballsVisited": t.balls_visited,
            "ballsCombined": t.balls_combined,
            "relationsRecomputed": t.relations_recomputed,
            "relationsIncremental": t.relations_incremental,
            "earlyReturns": t.early_returns,
            "rebuilds": t.rebuilds,
            "last": last,
        }))
    })
}
