use std::path::{Path, PathBuf};

use cctv_core::json::cameras_geojson;
use cctv_core::{build_graph, AugmentedModel, PreprocessError, RouteError, RoutingGraph};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Graph(#[from] RouteError),
}

/// A loaded dataset: the augmented model, its routing graph and the
/// pre-rendered camera collection. Immutable once built.
#[derive(Debug)]
pub struct Dataset {
    pub augmented: AugmentedModel,
    pub graph: RoutingGraph,
    /// Hex SHA-256 of the augmented OSM file as stored.
    pub hash: String,
    pub cameras_json: Vec<u8>,
}

impl Dataset {
    pub fn load(osm: &Path, weights: &Path) -> Result<Dataset, LoadError> {
        let read = |path: &Path| {
            std::fs::read(path).map_err(|source| LoadError::Read {
                path: path.to_path_buf(),
                source,
            })
        };
        Dataset::from_bytes(&read(osm)?, &read(weights)?)
    }

    pub fn from_bytes(osm: &[u8], weights: &[u8]) -> Result<Dataset, LoadError> {
        let augmented = AugmentedModel::from_bytes(osm, weights)?;
        Ok(Dataset::new(augmented, hex::encode(Sha256::digest(osm)))?)
    }

    pub fn new(augmented: AugmentedModel, hash: String) -> Result<Dataset, RouteError> {
        let graph = build_graph(&augmented)?;
        let cameras_json = serde_json::to_vec(&cameras_geojson(&augmented)).expect("json");
        Ok(Dataset {
            augmented,
            graph,
            hash,
            cameras_json,
        })
    }

    pub fn camera_count(&self) -> usize {
        self.augmented.cameras.len()
    }
}
