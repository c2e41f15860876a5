//! OSM XML document model, reader and writer, plus the camera CSV table.

mod cameras;
mod model;
mod xml;

use std::borrow::Cow;
use std::io::Read;

use thiserror::Error;

use crate::geo::GeoError;

pub use cameras::{parse_camera_csv, write_camera_csv, CAMERA_CSV_HEADER};
pub use model::{Bounds, NodeId, OsmModel, OsmNode, OsmWay, Tags, WayId};
pub use xml::{parse_osm, write_osm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OsmError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("way {way_id} references missing node {node_ref}")]
    Integrity { way_id: i64, node_ref: i64 },
    #[error("way {way_id} needs at least two distinct consecutive nodes")]
    DegenerateWay { way_id: i64 },
    #[error("camera csv schema: {0}")]
    CsvSchema(String),
    #[error("invalid camera in row {row}: {reason}")]
    InvalidCamera { row: usize, reason: String },
    #[error("gzip: {0}")]
    Decompress(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

/// Returns `bytes` unchanged, or inflated if they start with the gzip magic.
pub fn maybe_gunzip(bytes: &[u8]) -> Result<Cow<'_, [u8]>, OsmError> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        flate2::read::MultiGzDecoder::new(bytes)
            .read_to_end(&mut out)
            .map_err(|e| OsmError::Decompress(e.to_string()))?;
        Ok(Cow::Owned(out))
    } else {
        Ok(Cow::Borrowed(bytes))
    }
}
