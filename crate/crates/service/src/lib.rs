//! HTTP facade over the `irmrta` solvers.
//!
//! | Route | Purpose |
//! |---|---|
//! | `POST /api/v1/forward` | greedy allocation under given parameters |
//! | `POST /api/v1/inverse` | parameter recovery for a suggestion |
//! | `GET /api/v1/scenario` | random or fixture scenario, kept in a registry |
//! | `GET /api/v1/spec` | OpenAPI document |
//!
//! Inverse solves run on a bounded pool of blocking workers; requests
//! beyond the pool wait in FIFO order. A solve that overruns the time
//! budget answers 503 with its best partial result.

pub mod api;
pub mod error;
pub mod openapi;
pub mod registry;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tokio::sync::Semaphore;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::registry::{Registry, REGISTRY_CAPACITY};

pub const TIME_BUDGET_ENV: &str = "IRMRTA_TIME_BUDGET_MS";
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(120);
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub time_budget: Duration,
    /// Concurrent inverse solves.
    pub workers: usize,
    pub registry_capacity: usize,
    /// Allowed browser origin; `None` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            time_budget: DEFAULT_TIME_BUDGET,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            registry_capacity: REGISTRY_CAPACITY,
            cors_origin: None,
        }
    }
}

impl ServiceConfig {
    /// Defaults, with the time budget taken from `IRMRTA_TIME_BUDGET_MS`
    /// when set.
    pub fn from_env() -> Result<Self, String> {
        let mut config = Self::default();
        if let Ok(raw) = std::env::var(TIME_BUDGET_ENV) {
            let ms: u64 = raw
                .trim()
                .parse()
                .map_err(|_| format!("{TIME_BUDGET_ENV} must be an integer, got `{raw}`"))?;
            config.time_budget = Duration::from_millis(ms);
        }
        Ok(config)
    }

    /// Rejects settings that [`app`] cannot honour.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(origin) = &self.cors_origin {
            origin
                .parse::<HeaderValue>()
                .map_err(|_| format!("invalid CORS origin `{origin}`"))?;
        }
        Ok(())
    }
}

pub struct AppState {
    pub config: ServiceConfig,
    pub registry: Registry,
    pub workers: Arc<Semaphore>,
}

pub fn app(config: ServiceConfig) -> Router {
    let cors = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE])
        .allow_origin(match &config.cors_origin {
            Some(origin) => AllowOrigin::exact(origin.parse().expect("valid origin header value")),
            None => AllowOrigin::any(),
        });
    let state = Arc::new(AppState {
        registry: Registry::new(config.registry_capacity),
        workers: Arc::new(Semaphore::new(config.workers.max(1))),
        config,
    });
    Router::new()
        .route("/api/v1/forward", post(api::forward))
        .route("/api/v1/inverse", post(api::inverse))
        .route("/api/v1/scenario", get(api::scenario))
        .route("/api/v1/spec", get(api::spec))
        .layer(cors)
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app(config)).await
}
