use std::future::Future;
use std::sync::Arc;

use thiserror::Error;
use tokio::net::TcpListener;

use crate::api::{app, AppState};
use crate::config::ServiceConfig;
use crate::dataset::Dataset;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads the configured dataset into `state` off the async runtime.
pub async fn load_into(state: Arc<AppState>, config: &ServiceConfig) {
    let (osm, weights) = (config.osm.clone(), config.weights.clone());
    let started = std::time::Instant::now();
    match tokio::task::spawn_blocking(move || Dataset::load(&osm, &weights)).await {
        Ok(Ok(dataset)) => {
            tracing::info!(
                hash = %dataset.hash,
                cameras = dataset.camera_count(),
                vertices = dataset.graph.vertex_count(),
                elapsed_ms = started.elapsed().as_millis() as u64,
                "dataset loaded"
            );
            state.install(dataset);
        }
        Ok(Err(e)) => {
            tracing::error!(error = %e, "dataset load failed");
            state.set_load_error(e.to_string());
        }
        Err(e) => {
            tracing::error!(error = %e, "dataset load panicked");
            state.set_load_error(e.to_string());
        }
    }
}

/// Reloads the dataset on SIGHUP. On failure the previous one keeps serving.
async fn reload_on_hangup(state: Arc<AppState>, config: ServiceConfig) {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let Ok(mut hangup) = signal(SignalKind::hangup()) else { return };
        while hangup.recv().await.is_some() {
            tracing::info!("reloading dataset");
            load_into(state.clone(), &config).await;
        }
    }
    #[cfg(not(unix))]
    let _ = (state, config);
}

/// Binds `config.listen` and serves until `shutdown` resolves.
pub async fn serve(config: ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
    let listener = TcpListener::bind(config.listen).await.map_err(|source| ServeError::Bind {
        addr: config.listen,
        source,
    })?;
    serve_on(listener, config, shutdown).await
}

/// Serves on an already bound listener. The dataset loads in the
/// background; `/health` answers 503 until it is in place.
pub async fn serve_on(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let state = Arc::new(AppState::new(config.route_config()));
    tracing::info!(addr = %listener.local_addr()?, "listening");

    let loader = {
        let (state, config) = (state.clone(), config.clone());
        tokio::spawn(async move {
            load_into(state.clone(), &config).await;
            reload_on_hangup(state, config).await;
        })
    };
    let result = axum::serve(listener, app(state, &config))
        .with_graceful_shutdown(shutdown)
        .await;
    loader.abort();
    tracing::info!("shut down");
    Ok(result?)
}
