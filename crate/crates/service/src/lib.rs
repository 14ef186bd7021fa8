//! HTTP service running stress-comparison sessions.
//!
//! Sessions are stored as append-only JSONL logs under the data directory,
//! one file per session, and replayed on startup.

pub mod error;
pub mod export;
pub mod payload;
pub mod routes;
pub mod store;
pub mod tokens;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

pub use error::{Result, ServiceError};
pub use export::{export_study, read_export, ExportManifest, ExportedSession};
pub use routes::{router, AppState, ServiceConfig};
pub use store::SessionStore;

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> Result<()> {
    let state = Arc::new(AppState::open(&config)?);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(ServiceError::io(format!("bind {addr}")))?;
    let local = listener.local_addr().map_err(ServiceError::io("local address"))?;
    eprintln!("listening on http://{local}");
    serve_on(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

/// Serves `state` on an already bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServiceError::io("serve"))
}
