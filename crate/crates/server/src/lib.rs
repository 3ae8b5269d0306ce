//! HTTP API over a vault, mounted under `/api/v1`.
//!
//! Reads are open; every mutating route, `/me` and `/notifications` need an
//! `Authorization: Bearer <token>` header. Failures share one JSON shape,
//! [`ErrorBody`]. Routes and payloads are listed in `docs/api.md`.

mod error;
mod routes;
pub mod views;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::{header, HeaderValue, Method};
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::{ServeDir, ServeFile};

use archlib_core::vault::Vault;

pub use error::{status_of, ApiError, ErrorBody};

pub const API_PREFIX: &str = "/api/v1";
pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;

#[derive(Debug, Clone, Default)]
pub struct ServerConfig {
    /// Origins allowed to call the API from a browser; `*` allows any.
    pub cors_origins: Vec<String>,
    /// Directory holding a built web UI, served for non-API paths.
    pub ui_dir: Option<PathBuf>,
}

pub fn router(vault: Arc<Vault>, config: &ServerConfig) -> Router {
    let mut app = Router::new().nest(API_PREFIX, routes::api(vault));
    app = match &config.ui_dir {
        Some(dir) => app
            .fallback_service(ServeDir::new(dir).fallback(ServeFile::new(dir.join("index.html")))),
        None => app.fallback(routes::no_route),
    };
    if let Some(cors) = cors_layer(&config.cors_origins) {
        app = app.layer(cors);
    }
    app
}

fn cors_layer(origins: &[String]) -> Option<CorsLayer> {
    if origins.is_empty() {
        return None;
    }
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST, Method::PUT, Method::OPTIONS])
            .allow_headers([header::AUTHORIZATION, header::CONTENT_TYPE])
            .expose_headers([header::WARNING]),
    )
}

/// Serves until the process receives Ctrl-C.
pub async fn serve(
    vault: Arc<Vault>,
    addr: SocketAddr,
    config: ServerConfig,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}{API_PREFIX}", listener.local_addr()?);
    axum::serve(listener, router(vault, &config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
