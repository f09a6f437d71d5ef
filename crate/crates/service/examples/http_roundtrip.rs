//! Drives the HTTP router in-process: fetch the fixture scenario, run a
//! forward solve on it, then invert the result from the default nominal.
//!
//! `cargo run -p irmrta-service --release --example http_roundtrip`
//!
//! For a real listener use `irmrta serve --port 8080`.

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use irmrta_service::{app, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(
    router: &axum::Router,
    method: Method,
    uri: &str,
    body: Option<Value>,
) -> (u16, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = router.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::main]
async fn main() {
    let router = app(ServiceConfig::default());

    let (status, scenario) = call(
        &router,
        Method::GET,
        "/api/v1/scenario?fixture=qualitative",
        None,
    )
    .await;
    let id = scenario["scenario_id"].as_str().unwrap().to_string();
    println!(
        "GET scenario -> {status}, id {id}, layout {}",
        scenario["layout"]
    );

    let params = json!({"alpha": 0.49, "beta": 0.36, "delta": 0.75});
    let (status, fwd) = call(
        &router,
        Method::POST,
        "/api/v1/forward",
        Some(json!({"scenario_id": id, "params": params})),
    )
    .await;
    println!("POST forward -> {status}, allocation {}", fwd["allocation"]);

    let (status, inv) = call(
        &router,
        Method::POST,
        "/api/v1/inverse",
        Some(json!({"scenario_id": id, "suggestion": fwd["allocation"], "depth": 8})),
    )
    .await;
    println!(
        "POST inverse -> {status}, status {}, theta ({}, {}, {}), objective {}",
        inv["status"], inv["alpha"], inv["beta"], inv["delta"], inv["objective"]
    );

    let (status, bad) = call(
        &router,
        Method::POST,
        "/api/v1/inverse",
        Some(json!({"suggestion": []})),
    )
    .await;
    println!(
        "POST inverse without instance -> {status}: {}",
        bad["message"]
    );
}
