use std::sync::atomic::Ordering;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use teamsim::names::Labels;
use teamsim::service::{router, SharedState};
use teamsim::text::{parse_graph, parse_pattern};
use teamsim_core::batch_topk;
use tower::ServiceExt;

const GRAPH: &str = "node a A\nnode b B\nnode c C\nedge a b\nedge b c\n";
const PATTERN: &str = "pnode x A [1,1]\npnode y B [1,1]\npedge x y\n";

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, graph: &str, pattern: &str) -> (StatusCode, Value) {
    call(app, "POST", "/sessions", Some(json!({ "graph": graph, "pattern": pattern, "r": 1, "k": 3, "h": 2 }))).await
}

fn batch_nodes(graph: &str, pattern: &str) -> Vec<Vec<String>> {
    let mut labels = Labels::new();
    let doc = parse_graph(graph, &mut labels).unwrap();
    let p = parse_pattern(pattern, &mut labels).unwrap();
    let out = batch_topk(&p, &doc.graph, 1, 3).unwrap();
    out.teams().iter().map(|t| t.nodes().iter().map(|&v| doc.names.name(v)).collect()).collect()
}

fn team_nodes(v: &Value) -> Vec<Vec<String>> {
    v["teams"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["nodes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap().to_string()).collect())
        .collect()
}

#[tokio::test]
async fn create_returns_initial_teams() {
    let app = router(SharedState::default());
    let (status, body) = create(&app, GRAPH, PATTERN).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["satisfiable"], true);
    assert_eq!(body["teams"][0]["nodes"], json!(["a", "b"]));
    assert_eq!(body["teams"][0]["density"], json!({"e": 1, "n": 2}));
}

#[tokio::test]
async fn create_errors() {
    let app = router(SharedState::default());
    let unsat = "pnode u0 A [1,1]\npnode u1 B [1,1]\npnode u2 B [2,3]\npnode u3 C [1,1]\npedge u0 u1\npedge u0 u2\npedge u2 u3\n";
    let (status, body) = create(&app, GRAPH, unsat).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["satisfiable"], false);
    assert_eq!(body["teams"], json!([]));

    let (status, body) = create(&app, GRAPH, "pnode x A [2,1]\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!((body["line"].as_u64(), body["column"].as_u64()), (Some(1), Some(11)));
    assert_eq!(body["source"], "pattern");

    let (status, body) = create(&app, "node a A\nedge a q\n", PATTERN).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["line"], 2);

    let (status, _) = create(&app, GRAPH, "pnode x A [1,1]\npnode y B [1,1]\n").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn updates_track_batch_and_views_stay_consistent() {
    let app = router(SharedState::default());
    let (_, body) = create(&app, GRAPH, PATTERN).await;
    let id = body["id"].as_u64().unwrap();

    let (status, body) =
        call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["g+node d anchor=c labels=A", "g+edge d b"] }))).await;
    assert_eq!(status, StatusCode::OK);
    let g1 = "node a A\nnode b B\nnode c C\nnode d A\nedge a b\nedge b c\nedge c d\nedge d b\n";
    assert_eq!(team_nodes(&body), batch_nodes(g1, PATTERN));
    assert!(body["affectedBalls"].as_u64().unwrap() > 0);
    assert!(body["stats"]["totalMs"].is_number());

    let (status, teams) = call(&app, "GET", &format!("/sessions/{id}/teams"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(team_nodes(&teams), team_nodes(&body));
    assert_eq!(teams["teams"][0]["quality"]["nodeSatisfaction"].as_f64().or(teams["teams"][0]["quality"]["node_satisfaction"].as_f64()), Some(1.0));

    let (_, stats1) = call(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    let (status, empty) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(team_nodes(&empty), team_nodes(&body));
    assert_eq!(empty["stats"]["relationsRecomputed"], 0);
    let (_, stats2) = call(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    for key in ["updateSets", "affectedBalls", "ballsVisited", "relationsRecomputed"] {
        assert!(stats2[key].as_u64() >= stats1[key].as_u64(), "{key}");
    }
    assert_eq!(stats2["updateSets"], 2);

    let (status, _) =
        call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "pattern": ["p+node z anchor=y label=C cap=[1,*]"] }))).await;
    assert_eq!(status, StatusCode::OK);
    let (_, pattern) = call(&app, "GET", &format!("/sessions/{id}/pattern"), None).await;
    assert_eq!(pattern["nodes"].as_array().unwrap().len(), 3);
    assert!(pattern["text"].as_str().unwrap().contains("pnode z C [1,*]"));

    let (status, summary) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["nodes"], 4);
}

#[tokio::test]
async fn rejected_sets_leave_state_unchanged() {
    let app = router(SharedState::default());
    let (_, body) = create(&app, GRAPH, PATTERN).await;
    let id = body["id"].as_u64().unwrap();
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "pattern": ["p-edge x y"] }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) =
        call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["g+edge a c", "g+edge a b"] }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, body) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["g+edge a"] }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["line"], 1);
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["p-node x"] }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, summary) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(summary["edges"], 2);
    let (_, pattern) = call(&app, "GET", &format!("/sessions/{id}/pattern"), None).await;
    assert_eq!(pattern["edges"], json!([["x", "y"]]));
    let (_, stats) = call(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    assert_eq!(stats["updateSets"], 0);
}

#[tokio::test]
async fn unknown_sessions_and_busy_sessions() {
    let state = SharedState::default();
    let app = router(state.clone());
    for uri in ["/sessions/99", "/sessions/99/teams", "/sessions/99/pattern", "/sessions/99/stats"] {
        assert_eq!(call(&app, "GET", uri, None).await.0, StatusCode::NOT_FOUND, "{uri}");
    }
    assert_eq!(call(&app, "POST", "/sessions/99/updates", Some(json!({}))).await.0, StatusCode::NOT_FOUND);

    let (_, body) = create(&app, GRAPH, PATTERN).await;
    let id = body["id"].as_u64().unwrap();
    let slot = state.slot(id).unwrap();
    slot.busy.store(true, Ordering::SeqCst);
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["g-edge a b"] }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(call(&app, "GET", &format!("/sessions/{id}/teams"), None).await.0, StatusCode::OK);
    slot.busy.store(false, Ordering::SeqCst);
    let (status, body) = call(&app, "POST", &format!("/sessions/{id}/updates"), Some(json!({ "data": ["g-edge a b"] }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["teams"], json!([]));
}
