//! Planar projection and the geometry primitives the preprocessor and router
//! share: camera field-of-vision rings, parallel offsets, and segment/ring
//! intersection.

mod fov;
mod offset;
mod point;
mod polygon;

use thiserror::Error;

pub use fov::{build_fov_polygon, fov_ring, DEFAULT_ARC_STEP_DEG, MIN_RING_VERTICES};
pub use offset::{offset_polyline, offset_polyline_grouped, polyline_length, Side, MITER_LIMIT};
pub use point::{GeoPoint, LocalPoint, Projection, EARTH_RADIUS_M};
pub use polygon::{
    intersect_segment_polygon, point_in_polygon, point_segment_distance, Aabb, Crossing,
    FovPolygon, Interval, SegmentCrossings, BOUNDARY_EPS_M, GRAZING_EPS_M,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("invalid coordinate lat={lat} lon={lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("invalid camera {id}: {reason}")]
    InvalidCamera { id: u64, reason: String },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
}
