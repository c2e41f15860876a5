use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NO_ROUTE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Osm(#[from] cctv_core::OsmError),
    #[error(transparent)]
    Preprocess(#[from] cctv_core::PreprocessError),
    #[error(transparent)]
    Route(#[from] cctv_core::RouteError),
    #[error(transparent)]
    Synth(#[from] cctv_core::synth::SynthError),
    #[error(transparent)]
    Config(#[from] cctv_service::ConfigError),
    #[error(transparent)]
    Serve(#[from] cctv_service::ServeError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Input(_) => "input",
            CliError::Osm(_) => "osm",
            CliError::Preprocess(_) => "preprocess",
            CliError::Route(cctv_core::RouteError::NoSnapCandidate { .. }) => "no_snap_candidate",
            CliError::Route(_) => "route",
            CliError::Synth(_) => "synth",
            CliError::Config(_) => "config",
            CliError::Serve(_) => "serve",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Write { .. } => 1,
            CliError::Serve(cctv_service::ServeError::Io(_)) => 1,
            _ => EXIT_INPUT,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
