//! Synthetic street grids with randomly placed cameras, and a small builder
//! for hand-made scenes laid out in meters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::camera::{Camera, CameraId, CameraType};
use crate::geo::{GeoError, GeoPoint, LocalPoint, Projection};
use crate::osm::{NodeId, OsmModel, Tags, WayId};
use crate::preprocess::dataset_projection;

/// Default anchor of generated maps.
pub const DEFAULT_ORIGIN: GeoPoint = GeoPoint {
    lat: 62.2415,
    lon: 25.7209,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid grid: {0}")]
    InvalidDims(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub rows: usize,
    pub cols: usize,
    /// Distance between neighboring junctions, in meters.
    pub spacing: f64,
    pub cameras: usize,
    pub seed: u64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_angle: u32,
    pub angle_step: u32,
    pub width: f64,
    pub origin: GeoPoint,
}

impl SynthConfig {
    pub fn new(rows: usize, cols: usize, spacing: f64, cameras: usize, seed: u64) -> Self {
        SynthConfig {
            rows,
            cols,
            spacing,
            cameras,
            seed,
            min_radius: 5.0,
            max_radius: 30.0,
            min_angle: 60,
            angle_step: 30,
            width: 6.0,
            origin: DEFAULT_ORIGIN,
        }
    }

    fn check(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidDims(m));
        if self.rows < 2 || self.cols < 2 {
            return bad(format!("rows and cols must be at least 2, got {}x{}", self.rows, self.cols));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return bad(format!("spacing must be positive, got {}", self.spacing));
        }
        if !(self.min_radius > 0.0 && self.min_radius <= self.max_radius && self.max_radius.is_finite()) {
            return bad(format!("bad radius range [{}, {}]", self.min_radius, self.max_radius));
        }
        if self.angle_step == 0 || self.min_angle == 0 || self.min_angle > 360 {
            return bad(format!("bad angle range {}..360 step {}", self.min_angle, self.angle_step));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return bad(format!("width must be positive, got {}", self.width));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthMap {
    pub model: OsmModel,
    pub cameras: Vec<Camera>,
}

/// Builds a `rows × cols` junction grid with one two-node way per grid edge
/// and `cameras` cameras placed on random ways.
///
/// Coordinates are rounded to 7 decimals, the precision of the written files,
/// so a map generated in memory equals one read back from disk.
pub fn generate_grid(config: &SynthConfig) -> Result<SynthMap, SynthError> {
    config.check()?;
    config.origin.validate()?;
    let (rows, cols, s) = (config.rows, config.cols, config.spacing);
    let frame = Projection::new(config.origin)?;
    let half_w = (cols - 1) as f64 * s / 2.0;
    let half_h = (rows - 1) as f64 * s / 2.0;

    let mut model = OsmModel::new();
    let node_id = |r: usize, c: usize| (r * cols + c + 1) as NodeId;
    for r in 0..rows {
        for c in 0..cols {
            let p = LocalPoint::new(c as f64 * s - half_w, r as f64 * s - half_h);
            model.add_node(node_id(r, c), round7(frame.unproject(p)), Tags::new());
        }
    }
    let mut way_tags = Tags::new();
    way_tags.insert("highway", "residential");
    way_tags.insert("width", format_num(config.width));
    let mut next_way: WayId = 1;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                model.add_way(next_way, vec![node_id(r, c), node_id(r, c + 1)], way_tags.clone());
                next_way += 1;
            }
            if r + 1 < rows {
                model.add_way(next_way, vec![node_id(r, c), node_id(r + 1, c)], way_tags.clone());
                next_way += 1;
            }
        }
    }

    let projection = dataset_projection(&model);
    let way_ids: Vec<WayId> = model.ways.keys().copied().collect();
    let angles: Vec<u32> = (config.min_angle..=360).step_by(config.angle_step as usize).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cameras = Vec::with_capacity(config.cameras);
    for i in 0..config.cameras {
        let way = &model.ways[&way_ids[rng.random_range(0..way_ids.len())]];
        let a = projection.project(model.nodes[&way.node_refs[0]].location);
        let b = projection.project(model.nodes[&way.node_refs[1]].location);
        let at = a.lerp(b, rng.random_range(0.0..=1.0));
        let radius = round_to(rng.random_range(config.min_radius..=config.max_radius), 2);
        let angle = angles[rng.random_range(0..angles.len())] as f64;
        let direction = round_to(rng.random_range(0.0..360.0), 2) % 360.0;
        let id = CameraId(i as u64 + 1);
        let location = round7(projection.unproject(at));
        let camera = if angle >= 360.0 {
            Camera::new(id, location, CameraType::Round, radius, 360.0, 0.0)?
        } else {
            Camera::new(id, location, CameraType::Directed, radius, angle, direction)?
        };
        cameras.push(camera);
    }
    Ok(SynthMap { model, cameras })
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let k = 10f64.powi(decimals);
    (v * k).round() / k
}

fn round7(p: GeoPoint) -> GeoPoint {
    GeoPoint {
        lat: round_to(p.lat, 7),
        lon: round_to(p.lon, 7),
    }
}

fn format_num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

/// Lays out nodes, ways and cameras in meters and turns them into a model
/// whose dataset frame has the same axes, so local coordinates given here
/// are recovered exactly (up to a translation, see [`Scene::local`]).
#[derive(Debug, Clone)]
pub struct SceneBuilder {
    origin: GeoPoint,
    nodes: Vec<(NodeId, LocalPoint, Tags)>,
    ways: Vec<(WayId, Vec<NodeId>, Tags)>,
    cameras: Vec<(CameraId, LocalPoint, CameraType, f64, f64, f64)>,
}

impl Default for SceneBuilder {
    fn default() -> Self {
        SceneBuilder::new(DEFAULT_ORIGIN)
    }
}

impl SceneBuilder {
    pub fn new(origin: GeoPoint) -> Self {
        SceneBuilder {
            origin,
            nodes: Vec::new(),
            ways: Vec::new(),
            cameras: Vec::new(),
        }
    }

    pub fn node(&mut self, x: f64, y: f64) -> NodeId {
        let id = self.nodes.len() as NodeId + 1;
        self.nodes.push((id, LocalPoint::new(x, y), Tags::new()));
        id
    }

    pub fn way(&mut self, refs: &[NodeId], tags: &[(&str, &str)]) -> WayId {
        let id = self.ways.len() as WayId + 1;
        self.ways
            .push((id, refs.to_vec(), tags.iter().map(|&(k, v)| (k, v)).collect()));
        id
    }

    /// A chain of nodes through `points`, joined by one way.
    pub fn path(&mut self, points: &[(f64, f64)], tags: &[(&str, &str)]) -> WayId {
        let refs: Vec<NodeId> = points.iter().map(|&(x, y)| self.node(x, y)).collect();
        self.way(&refs, tags)
    }

    pub fn round_camera(&mut self, id: u64, x: f64, y: f64, radius: f64) {
        self.cameras
            .push((CameraId(id), LocalPoint::new(x, y), CameraType::Round, radius, 360.0, 0.0));
    }

    pub fn directed_camera(&mut self, id: u64, x: f64, y: f64, radius: f64, angle: f64, direction: f64) {
        self.cameras.push((
            CameraId(id),
            LocalPoint::new(x, y),
            CameraType::Directed,
            radius,
            angle,
            direction,
        ));
    }

    pub fn build(self) -> Result<Scene, GeoError> {
        let frame = Projection::new(self.origin)?;
        let (mut lo, mut hi) = (LocalPoint::new(0.0, 0.0), LocalPoint::new(0.0, 0.0));
        if let Some((_, first, _)) = self.nodes.first() {
            (lo, hi) = (*first, *first);
            for (_, p, _) in &self.nodes {
                lo = LocalPoint::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = LocalPoint::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        let shift = lo.midpoint(hi);

        let mut model = OsmModel::new();
        for (id, p, tags) in self.nodes {
            model.add_node(id, frame.unproject(p - shift), tags);
        }
        for (id, refs, tags) in self.ways {
            model.add_way(id, refs, tags);
        }
        let cameras = self
            .cameras
            .into_iter()
            .map(|(id, p, ty, r, a, d)| Camera::new(id, frame.unproject(p - shift), ty, r, a, d))
            .collect::<Result<Vec<_>, _>>()?;
        let projection = dataset_projection(&model);
        Ok(Scene {
            model,
            cameras,
            projection,
            shift,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub model: OsmModel,
    pub cameras: Vec<Camera>,
    /// Frame [`dataset_projection`] picks for `model`.
    pub projection: Projection,
    shift: LocalPoint,
}

impl Scene {
    /// Geographic position of a builder coordinate.
    pub fn geo(&self, x: f64, y: f64) -> GeoPoint {
        self.projection.unproject(LocalPoint::new(x, y) - self.shift)
    }

    /// Builder coordinate of a geographic position.
    pub fn local(&self, p: GeoPoint) -> LocalPoint {
        self.projection.project(p) + self.shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_grid_has_four_ways() {
        let map = generate_grid(&SynthConfig::new(2, 2, 100.0, 0, 1)).unwrap();
        assert_eq!(map.model.nodes.len(), 4);
        assert_eq!(map.model.ways.len(), 4);
        assert!(map.cameras.is_empty());
    }

    #[test]
    fn grid_edge_count() {
        for (r, c) in [(2, 3), (4, 4), (5, 7)] {
            let map = generate_grid(&SynthConfig::new(r, c, 50.0, 0, 1)).unwrap();
            assert_eq!(map.model.ways.len(), 2 * r * c - r - c);
        }
    }

    #[test]
    fn same_seed_same_map() {
        let cfg = SynthConfig::new(5, 6, 40.0, 12, 7);
        let a = generate_grid(&cfg).unwrap();
        let b = generate_grid(&cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.cameras, b.cameras);
        let c = generate_grid(&SynthConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.cameras, c.cameras);
    }

    #[test]
    fn camera_attributes_in_range() {
        let map = generate_grid(&SynthConfig::new(6, 6, 50.0, 200, 3)).unwrap();
        let proj = dataset_projection(&map.model);
        for cam in &map.cameras {
            assert!((5.0..=30.0).contains(&cam.radius));
            assert!((0.0..360.0).contains(&cam.direction));
            assert!(cam.angle >= 60.0 && cam.angle <= 360.0);
            assert_eq!(cam.angle % 30.0, 0.0);
            assert_eq!(cam.is_round(), cam.angle == 360.0);
            let p = proj.project(cam.location);
            // on a grid line
            let on_x = ((p.x + 125.0) / 50.0 - ((p.x + 125.0) / 50.0).round()).abs() < 1e-3;
            let on_y = ((p.y + 125.0) / 50.0 - ((p.y + 125.0) / 50.0).round()).abs() < 1e-3;
            assert!(on_x || on_y, "{p:?}");
        }
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(generate_grid(&SynthConfig::new(1, 5, 10.0, 0, 1)).is_err());
        assert!(generate_grid(&SynthConfig::new(3, 3, 0.0, 0, 1)).is_err());
        assert!(generate_grid(&SynthConfig::new(3, 3, -2.0, 0, 1)).is_err());
    }

    #[test]
    fn scene_recovers_local_coordinates() {
        let mut b = SceneBuilder::default();
        let w = b.path(&[(0.0, 0.0), (300.0, 0.0), (300.0, 120.0)], &[("highway", "footway")]);
        b.round_camera(1, 150.0, 0.0, 10.0);
        let scene = b.build().unwrap();
        let way = &scene.model.ways[&w];
        let pts: Vec<LocalPoint> = way
            .node_refs
            .iter()
            .map(|r| scene.local(scene.model.nodes[r].location))
            .collect();
        for (p, q) in pts.iter().zip([(0.0, 0.0), (300.0, 0.0), (300.0, 120.0)]) {
            assert!((p.x - q.0).abs() < 1e-6 && (p.y - q.1).abs() < 1e-6, "{p:?}");
        }
        let c = scene.local(scene.cameras[0].location);
        assert!((c.x - 150.0).abs() < 1e-6 && c.y.abs() < 1e-6);
    }
}
