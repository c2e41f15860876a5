//! CCTV-aware pedestrian routing over OpenStreetMap data.
//!
//! Cameras are turned into field-of-vision polygons, the street network is
//! split and annotated where it enters and leaves them, and routes are
//! computed in default, privacy or safety mode.

pub mod camera;
pub mod geo;
pub mod json;
pub mod osm;
pub mod preprocess;
pub mod router;
pub mod synth;

pub use camera::{Camera, CameraId, CameraType};
pub use geo::{FovPolygon, GeoError, GeoPoint, LocalPoint, Projection};
pub use osm::{parse_camera_csv, parse_osm, write_camera_csv, write_osm, OsmError, OsmModel};
pub use preprocess::{augment, emit_weights, AugmentedModel, PreprocessConfig, PreprocessError, WeightRow};
pub use router::{build_graph, route, Mode, RouteConfig, RouteError, RouteRequest, RouteResult, RouteStatus, RoutingGraph};
