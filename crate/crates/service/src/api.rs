use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use cctv_core::json::route_json;
use cctv_core::{route, GeoPoint, Mode, RouteConfig, RouteError, RouteRequest};
use serde_json::json;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::config::ServiceConfig;
use crate::dataset::Dataset;

/// Shared state. The dataset is swapped atomically on (re)load; requests
/// hold an `Arc` to the one they started with.
#[derive(Debug)]
pub struct AppState {
    dataset: RwLock<Option<Arc<Dataset>>>,
    load_error: RwLock<Option<String>>,
    route_config: RouteConfig,
}

impl AppState {
    pub fn new(route_config: RouteConfig) -> Self {
        AppState {
            dataset: RwLock::new(None),
            load_error: RwLock::new(None),
            route_config,
        }
    }

    pub fn install(&self, dataset: Dataset) {
        *self.dataset.write().expect("lock") = Some(Arc::new(dataset));
        *self.load_error.write().expect("lock") = None;
    }

    /// Records a failed load. A dataset already installed keeps serving.
    pub fn set_load_error(&self, message: String) {
        *self.load_error.write().expect("lock") = Some(message);
    }

    pub fn current(&self) -> Option<Arc<Dataset>> {
        self.dataset.read().expect("lock").clone()
    }
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_ready(state: &AppState) -> Self {
        let message = match &*state.load_error.read().expect("lock") {
            Some(e) => format!("dataset failed to load: {e}"),
            None => "dataset is loading".to_string(),
        };
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "not_ready", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.code, "message": self.message });
        (self.status, json_body(serde_json::to_vec(&body).expect("json"))).into_response()
    }
}

fn json_body(bytes: Vec<u8>) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], bytes)
}

fn parse_point(name: &str, value: Option<&String>) -> Result<GeoPoint, ApiError> {
    let value = value.ok_or_else(|| ApiError::bad_request(format!("missing `{name}`")))?;
    let bad = || ApiError::bad_request(format!("`{name}` must be <lat>,<lon>, got {value:?}"));
    let (lat, lon) = value.split_once(',').ok_or_else(bad)?;
    let lat: f64 = lat.trim().parse().map_err(|_| bad())?;
    let lon: f64 = lon.trim().parse().map_err(|_| bad())?;
    GeoPoint::new(lat, lon).map_err(|e| ApiError::bad_request(format!("`{name}`: {e}")))
}

async fn route_handler(
    State(state): State<Arc<AppState>>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Query(params) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let from = parse_point("from", params.get("from"))?;
    let to = parse_point("to", params.get("to"))?;
    let mode = match params.get("mode").map(String::as_str) {
        None | Some("") => Mode::Default,
        Some(m) => m.parse::<Mode>().map_err(ApiError::bad_request)?,
    };
    let dataset = state.current().ok_or_else(|| ApiError::not_ready(&state))?;
    let config = state.route_config;
    let result = tokio::task::spawn_blocking(move || {
        route(&dataset.graph, &RouteRequest { from, to, mode }, &config)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    match result {
        Ok(r) => Ok(json_body(serde_json::to_vec(&route_json(&r)).expect("json"))),
        Err(e @ RouteError::NoSnapCandidate { .. }) => {
            Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "no_snap_candidate", e.to_string()))
        }
        Err(e) => {
            tracing::error!(error = %e, "route failed");
            Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))
        }
    }
}

async fn cameras_handler(State(state): State<Arc<AppState>>) -> Result<impl IntoResponse, ApiError> {
    let dataset = state.current().ok_or_else(|| ApiError::not_ready(&state))?;
    Ok(json_body(dataset.cameras_json.clone()))
}

async fn health_handler(State(state): State<Arc<AppState>>) -> Response {
    match state.current() {
        Some(d) => {
            let body = json!({
                "status": "ok",
                "dataset_hash": d.hash,
                "camera_count": d.camera_count(),
            });
            json_body(serde_json::to_vec(&body).expect("json")).into_response()
        }
        None => {
            let status = if state.load_error.read().expect("lock").is_some() {
                "error"
            } else {
                "loading"
            };
            let body = json!({ "status": status });
            (StatusCode::SERVICE_UNAVAILABLE, json_body(serde_json::to_vec(&body).expect("json"))).into_response()
        }
    }
}

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods([Method::GET, Method::OPTIONS]);
    if origins.iter().any(|o| o == "*") {
        layer.allow_origin(AllowOrigin::any())
    } else {
        let list: Vec<HeaderValue> = origins.iter().filter_map(|o| o.parse().ok()).collect();
        layer.allow_origin(AllowOrigin::list(list))
    }
}

/// The HTTP application for `state`, with CORS and optional static files.
pub fn app(state: Arc<AppState>, config: &ServiceConfig) -> Router {
    let mut router = Router::new()
        .route("/route", get(route_handler))
        .route("/cameras", get(cameras_handler))
        .route("/health", get(health_handler));
    if let Some(dir) = &config.ui_dir {
        router = router.fallback_service(ServeDir::new(dir));
    }
    router.layer(cors(&config.cors_origins)).with_state(state)
}
