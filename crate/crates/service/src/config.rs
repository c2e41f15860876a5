use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use cctv_core::RouteConfig;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Service settings, read from a TOML file.
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// osm = "data/augmented.osm"
/// weights = "data/weights.csv"
/// beta = 1.0
/// cap = 1.6
/// cors_origins = ["http://localhost:5173"]
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    pub osm: PathBuf,
    pub weights: PathBuf,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_cap")]
    pub cap: f64,
    /// Allowed origins; `"*"` allows any.
    #[serde(default)]
    pub cors_origins: Vec<String>,
    /// Static files served under `/` (the web client build).
    #[serde(default)]
    pub ui_dir: Option<PathBuf>,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_beta() -> f64 {
    RouteConfig::default().beta
}

fn default_cap() -> f64 {
    RouteConfig::default().cap
}

impl ServiceConfig {
    pub fn new(osm: impl Into<PathBuf>, weights: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen: default_listen(),
            osm: osm.into(),
            weights: weights.into(),
            beta: default_beta(),
            cap: default_cap(),
            cors_origins: Vec::new(),
            ui_dir: None,
        }
    }

    /// Reads and validates a config file. Relative dataset paths resolve
    /// against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: ServiceConfig = toml::from_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.osm = base.join(&cfg.osm);
            cfg.weights = base.join(&cfg.weights);
            cfg.ui_dir = cfg.ui_dir.map(|d| base.join(d));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.route_config()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for origin in &self.cors_origins {
            if origin != "*" && origin.parse::<axum::http::HeaderValue>().is_err() {
                return Err(ConfigError::Invalid(format!("bad CORS origin {origin:?}")));
            }
        }
        Ok(())
    }

    pub fn route_config(&self) -> RouteConfig {
        RouteConfig {
            beta: self.beta,
            cap: self.cap,
            ..RouteConfig::default()
        }
    }
}
