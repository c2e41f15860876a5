//! Augments an OSM model with surveillance cameras.
//!
//! For every camera (in ascending id order) the camera is added as a node,
//! its field of vision is built, nearby travellable ways are split into a
//! left, middle and right way, and a boundary node is inserted wherever a way
//! enters or leaves the field of vision. A final pass classifies every edge
//! by the cameras that see it and produces the coverage table the safety
//! router consumes.

mod extract;
mod inject;
mod load;
mod split;
mod weights;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::camera::{Camera, CameraId};
use crate::geo::{build_fov_polygon, FovPolygon, GeoError, GeoPoint, LocalPoint, Projection};
use crate::osm::{NodeId, OsmError, OsmModel, OsmWay, Tags, WayId};

pub use extract::create_local_extract;
pub use weights::{emit_weights, parse_weights};

pub const TAG_SIDE: &str = "cctv:side";
pub const TAG_PARENT: &str = "cctv:parent";
pub const TAG_CAMERA: &str = "cctv:camera";
pub const TAG_ARC_STEP: &str = "cctv:arc_step";

/// Crossings closer than this to an existing way node reuse that node.
pub const ENDPOINT_SNAP_M: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreprocessError {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Osm(#[from] OsmError),
    #[error("model already contains camera augmentation")]
    AlreadyAugmented,
    #[error("camera id {0} appears more than once")]
    DuplicateCamera(CameraId),
    #[error("weights: {0}")]
    Weights(String),
}

/// Fallback widths for ways without a usable `width` tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthDefaults {
    /// footway, path, cycleway
    pub footway: f64,
    /// residential, service
    pub residential: f64,
    pub other: f64,
}

impl Default for WidthDefaults {
    fn default() -> Self {
        WidthDefaults {
            footway: 3.0,
            residential: 6.0,
            other: 8.0,
        }
    }
}

impl WidthDefaults {
    pub fn width_of(&self, way: &OsmWay) -> f64 {
        way.width().unwrap_or_else(|| match way.tags.get("highway") {
            Some("footway" | "path" | "cycleway") => self.footway,
            Some("residential" | "service") => self.residential,
            _ => self.other,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreprocessConfig {
    /// Widest arc segment of a field-of-vision ring, in degrees.
    pub arc_step: f64,
    /// Lower bound of the extract radius around each camera, in meters.
    pub min_extract_radius: f64,
    /// Slack added to `radius + max_width / 2` for the extract radius.
    pub extract_margin: f64,
    pub widths: WidthDefaults,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            arc_step: crate::geo::DEFAULT_ARC_STEP_DEG,
            min_extract_radius: 25.0,
            extract_margin: 5.0,
            widths: WidthDefaults::default(),
        }
    }
}

/// The three parallel ways that replace one original way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitWaySet {
    pub original_way_id: WayId,
    pub left_way_id: WayId,
    /// The original way keeps its id and becomes the middle way.
    pub middle_way_id: WayId,
    pub right_way_id: WayId,
    pub offset: f64,
    pub connector_way_ids: Vec<WayId>,
}

/// An edge seen by at least one camera. `from < to`; the edge is undirected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WeightRow {
    pub from_node: NodeId,
    pub to_node: NodeId,
    pub coverage_count: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AugmentSummary {
    pub cameras_added: usize,
    pub ways_split: usize,
    pub boundary_nodes: usize,
    pub covered_edges: usize,
}

/// An OSM model after camera augmentation, with everything the router needs.
#[derive(Debug, Clone)]
pub struct AugmentedModel {
    pub model: OsmModel,
    pub weights: Vec<WeightRow>,
    pub fov_index: BTreeMap<CameraId, FovPolygon>,
    pub cameras: Vec<Camera>,
    pub projection: Projection,
    /// Populated by [`augment`]; empty for models loaded from disk.
    pub split_ways: Vec<SplitWaySet>,
    /// Cameras seeing each covered edge, keyed by `(min id, max id)`.
    pub edge_cameras: BTreeMap<(NodeId, NodeId), Vec<CameraId>>,
    pub summary: AugmentSummary,
}

pub fn edge_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Projection used for a dataset: centered on the extent of its source
/// (non-negative id) nodes, so that the frame survives augmentation.
pub fn dataset_projection(model: &OsmModel) -> Projection {
    let bounds = model
        .node_bounds(|n| n.id >= 0)
        .or_else(|| model.node_bounds(|_| true))
        .or(model.declared_bounds);
    let origin = bounds.map_or(GeoPoint { lat: 0.0, lon: 0.0 }, |b| b.centroid());
    Projection::new(origin).expect("centroid of valid coordinates is valid")
}

pub fn is_augmented(model: &OsmModel) -> bool {
    model.ways.values().any(|w| w.tags.get(TAG_SIDE).is_some())
        || model
            .nodes
            .values()
            .any(|n| n.tags.has("man_made", "surveillance") && n.tags.get(TAG_CAMERA).is_some())
}

/// Runs the whole augmentation. Deterministic in its inputs.
pub fn augment(
    model: &OsmModel,
    cameras: &[Camera],
    config: &PreprocessConfig,
) -> Result<AugmentedModel, PreprocessError> {
    let mut cameras = cameras.to_vec();
    cameras.sort_by_key(|c| c.id);
    if let Some(w) = cameras.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(PreprocessError::DuplicateCamera(w[0].id));
    }
    let mut augmenter = Augmenter::new(model.clone(), *config)?;
    for camera in &cameras {
        augmenter.process_camera(camera)?;
    }
    augmenter.finish()
}

/// Working state of an augmentation run.
pub struct Augmenter {
    model: OsmModel,
    config: PreprocessConfig,
    projection: Projection,
    local: HashMap<NodeId, LocalPoint>,
    /// Number of travellable ways each node belongs to.
    usage: HashMap<NodeId, u32>,
    next_id: i64,
    max_width: f64,
    cameras: Vec<Camera>,
    fov_index: BTreeMap<CameraId, FovPolygon>,
    split: BTreeMap<WayId, SplitWaySet>,
    boundary_nodes: usize,
}

impl Augmenter {
    pub fn new(model: OsmModel, config: PreprocessConfig) -> Result<Self, PreprocessError> {
        model.validate()?;
        if is_augmented(&model) {
            return Err(PreprocessError::AlreadyAugmented);
        }
        let projection = dataset_projection(&model);
        let local = model
            .nodes
            .values()
            .map(|n| (n.id, projection.project(n.location)))
            .collect();
        let mut usage: HashMap<NodeId, u32> = HashMap::new();
        let mut max_width: f64 = 0.0;
        for way in model.ways.values().filter(|w| w.is_travellable()) {
            max_width = max_width.max(config.widths.width_of(way));
            for r in distinct_refs(way) {
                *usage.entry(r).or_default() += 1;
            }
        }
        let lowest = model
            .nodes
            .keys()
            .next()
            .copied()
            .into_iter()
            .chain(model.ways.keys().next().copied())
            .min()
            .unwrap_or(0);
        Ok(Augmenter {
            model,
            config,
            projection,
            local,
            usage,
            next_id: lowest.min(0) - 1,
            max_width,
            cameras: Vec::new(),
            fov_index: BTreeMap::new(),
            split: BTreeMap::new(),
            boundary_nodes: 0,
        })
    }

    pub fn model(&self) -> &OsmModel {
        &self.model
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn local_point(&self, id: NodeId) -> LocalPoint {
        self.local[&id]
    }

    pub fn extract_radius(&self, camera: &Camera) -> f64 {
        self.config
            .min_extract_radius
            .max(camera.radius + self.max_width / 2.0 + self.config.extract_margin)
    }

    fn alloc_id(&mut self) -> i64 {
        let id = self.next_id;
        self.next_id -= 1;
        id
    }

    fn add_node(&mut self, p: LocalPoint, tags: Tags) -> NodeId {
        let id = self.alloc_id();
        self.model.add_node(id, self.projection.unproject(p), tags);
        self.local.insert(id, p);
        id
    }

    fn add_way(&mut self, refs: Vec<NodeId>, tags: Tags) -> WayId {
        let id = self.alloc_id();
        let way = OsmWay {
            id,
            node_refs: refs,
            tags,
        };
        if way.is_travellable() {
            for r in distinct_refs(&way) {
                *self.usage.entry(r).or_default() += 1;
            }
        }
        self.model.ways.insert(id, way);
        id
    }

    fn way_points(&self, way: &OsmWay) -> Vec<LocalPoint> {
        way.node_refs.iter().map(|r| self.local[r]).collect()
    }

    /// Adds one camera: its node, its field of vision, the split of every
    /// travellable way in its neighborhood, and the boundary nodes where
    /// ways cross the field of vision.
    pub fn process_camera(&mut self, camera: &Camera) -> Result<(), PreprocessError> {
        if self.fov_index.contains_key(&camera.id) {
            return Err(PreprocessError::DuplicateCamera(camera.id));
        }
        let fov = build_fov_polygon(camera, &self.projection, self.config.arc_step)?;

        let tags = camera_tags(camera, self.config.arc_step);
        let apex = fov.apex;
        let node_id = self.alloc_id();
        self.model.add_node(node_id, camera.location, tags);
        self.local.insert(node_id, apex);

        let reach = self.extract_radius(camera);
        let nearby = extract::ways_near(&self.model, &self.local, apex, reach);
        for way_id in nearby {
            let way = &self.model.ways[&way_id];
            if !way.is_travellable()
                || way.tags.get(TAG_SIDE).is_some()
                || self.split.contains_key(&way_id)
            {
                continue;
            }
            let width = self.config.widths.width_of(way);
            let set = self.split_way(way_id, width)?;
            // Ways created now must also honour cameras processed earlier.
            let created: Vec<WayId> = [set.left_way_id, set.right_way_id]
                .into_iter()
                .chain(set.connector_way_ids.iter().copied())
                .collect();
            let earlier: Vec<CameraId> = self.fov_index.keys().copied().collect();
            for cam in earlier {
                for &w in &created {
                    self.inject_for(w, cam, None);
                }
            }
            self.split.insert(way_id, set);
        }

        let bbox = fov.bbox();
        let candidates: Vec<WayId> = self
            .model
            .ways
            .values()
            .filter(|w| w.is_travellable())
            .filter(|w| {
                crate::geo::Aabb::from_points(&self.way_points(w))
                    .is_some_and(|b| b.intersects(&bbox.expanded(ENDPOINT_SNAP_M)))
            })
            .map(|w| w.id)
            .collect();
        for way_id in candidates {
            self.inject_for(way_id, camera.id, Some(&fov));
        }

        self.fov_index.insert(camera.id, fov);
        self.cameras.push(camera.clone());
        Ok(())
    }

    fn inject_for(&mut self, way_id: WayId, camera_id: CameraId, fov: Option<&FovPolygon>) {
        let fov = match fov {
            Some(f) => f.clone(),
            None => self.fov_index[&camera_id].clone(),
        };
        self.boundary_nodes += self.inject_boundary_nodes(way_id, &fov);
    }

    /// Classifies every edge and assembles the result.
    pub fn finish(self) -> Result<AugmentedModel, PreprocessError> {
        let edge_cameras = weights::classify_edges(&self.model, &self.local, &self.fov_index);
        let weights: Vec<WeightRow> = edge_cameras
            .iter()
            .map(|(&(a, b), cams)| WeightRow {
                from_node: a,
                to_node: b,
                coverage_count: cams.len() as u32,
            })
            .collect();
        let summary = AugmentSummary {
            cameras_added: self.cameras.len(),
            ways_split: self.split.len(),
            boundary_nodes: self.boundary_nodes,
            covered_edges: weights.len(),
        };
        self.model.validate()?;
        Ok(AugmentedModel {
            model: self.model,
            weights,
            fov_index: self.fov_index,
            cameras: self.cameras,
            projection: self.projection,
            split_ways: self.split.into_values().collect(),
            edge_cameras,
            summary,
        })
    }
}

fn distinct_refs(way: &OsmWay) -> impl Iterator<Item = NodeId> + '_ {
    let closed = way.node_refs.len() > 1 && way.node_refs.first() == way.node_refs.last();
    let n = way.node_refs.len() - usize::from(closed);
    way.node_refs[..n].iter().copied()
}

pub(crate) fn camera_tags(camera: &Camera, arc_step: f64) -> Tags {
    let mut tags = Tags::new();
    tags.insert("man_made", "surveillance");
    tags.insert("surveillance:type", "camera");
    tags.insert("camera:type", camera.cam_type.as_str());
    tags.insert("camera:radius", camera.radius.to_string());
    tags.insert("camera:angle", camera.angle.to_string());
    tags.insert("camera:direction", camera.direction.to_string());
    tags.insert(TAG_CAMERA, camera.id.to_string());
    tags.insert(TAG_ARC_STEP, arc_step.to_string());
    tags
}
