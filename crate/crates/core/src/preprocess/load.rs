use std::collections::BTreeMap;

use crate::camera::{Camera, CameraId, CameraType};
use crate::geo::{build_fov_polygon, point_in_polygon, GeoError, DEFAULT_ARC_STEP_DEG};
use crate::osm::{maybe_gunzip, parse_osm, OsmError, OsmModel, OsmNode};

use super::{
    dataset_projection, parse_weights, AugmentSummary, AugmentedModel, PreprocessError, WeightRow,
    TAG_ARC_STEP, TAG_CAMERA, TAG_SIDE,
};

impl AugmentedModel {
    /// Rebuilds an augmented model from its serialized OSM document and
    /// coverage table (plain or gzip).
    pub fn from_bytes(osm: &[u8], weights: &[u8]) -> Result<AugmentedModel, PreprocessError> {
        let model = parse_osm(&maybe_gunzip(osm)?)?;
        let weights = parse_weights(&maybe_gunzip(weights)?)?;
        AugmentedModel::from_parts(model, weights)
    }

    /// Recovers cameras from their nodes, rebuilds their fields of vision in
    /// the dataset frame and attributes each covered edge to the cameras
    /// containing its midpoint.
    pub fn from_parts(model: OsmModel, weights: Vec<WeightRow>) -> Result<AugmentedModel, PreprocessError> {
        model.validate()?;
        let projection = dataset_projection(&model);

        let mut cameras = Vec::new();
        let mut fov_index = BTreeMap::new();
        for node in model.nodes.values() {
            if let Some((camera, arc_step)) = camera_from_node(node)? {
                let fov = build_fov_polygon(&camera, &projection, arc_step)?;
                fov_index.insert(camera.id, fov);
                cameras.push(camera);
            }
        }
        cameras.sort_by_key(|c| c.id);

        let mut edge_cameras = BTreeMap::new();
        for w in &weights {
            let locate = |id| {
                model
                    .node_location(id)
                    .map(|p| projection.project(p))
                    .ok_or(OsmError::Integrity {
                        way_id: 0,
                        node_ref: id,
                    })
            };
            let mid = locate(w.from_node)?.midpoint(locate(w.to_node)?);
            let mut cams: Vec<CameraId> = fov_index
                .values()
                .filter(|f| point_in_polygon(mid, f))
                .map(|f| f.camera_id)
                .collect();
            if cams.is_empty() {
                // Rounded coordinates can nudge an edge that hugs a ring just
                // outside it; attribute it to the nearest rings instead.
                let mut by_distance: Vec<(f64, CameraId)> = fov_index
                    .values()
                    .map(|f| (f.distance_to_boundary(mid), f.camera_id))
                    .collect();
                by_distance.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                cams = by_distance
                    .into_iter()
                    .take(w.coverage_count as usize)
                    .map(|(_, id)| id)
                    .collect();
                cams.sort();
            }
            edge_cameras.insert((w.from_node, w.to_node), cams);
        }

        let summary = AugmentSummary {
            cameras_added: cameras.len(),
            ways_split: model
                .ways
                .values()
                .filter(|w| w.tags.has(TAG_SIDE, "middle"))
                .count(),
            boundary_nodes: model
                .nodes
                .values()
                .filter(|n| n.id < 0 && n.tags.has("access", "surveillance"))
                .count(),
            covered_edges: weights.len(),
        };
        Ok(AugmentedModel {
            model,
            weights,
            fov_index,
            cameras,
            projection,
            split_ways: Vec::new(),
            edge_cameras,
            summary,
        })
    }
}

fn camera_from_node(node: &OsmNode) -> Result<Option<(Camera, f64)>, PreprocessError> {
    let tags = &node.tags;
    if !tags.has("man_made", "surveillance") {
        return Ok(None);
    }
    let Some(raw_id) = tags.get(TAG_CAMERA) else {
        return Ok(None);
    };
    let invalid = |reason: String| GeoError::InvalidCamera {
        id: raw_id.parse().unwrap_or(0),
        reason,
    };
    let id: u64 = raw_id
        .parse()
        .map_err(|_| invalid(format!("camera id {raw_id:?} on node {}", node.id)))?;
    let num = |key: &str, default: Option<f64>| -> Result<f64, GeoError> {
        match tags.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| invalid(format!("{key}={v:?} is not a number"))),
            None => default.ok_or_else(|| invalid(format!("missing {key}"))),
        }
    };
    let cam_type: CameraType = tags
        .get("camera:type")
        .unwrap_or("round")
        .parse()
        .map_err(invalid)?;
    let radius = num("camera:radius", None)?;
    let angle = num("camera:angle", Some(360.0))?;
    let direction = num("camera:direction", Some(0.0))?;
    let arc_step = num(TAG_ARC_STEP, Some(DEFAULT_ARC_STEP_DEG))?;
    let camera = Camera::new(CameraId(id), node.location, cam_type, radius, angle, direction)?;
    Ok(Some((camera, arc_step)))
}
