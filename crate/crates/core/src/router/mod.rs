//! Point-to-point routing over an augmented model in three modes.
//!
//! * `default`: shortest walking route.
//! * `privacy`: shortest route that uses no edge inside any field of vision.
//!   When the destination cannot be reached that way the route ends at the
//!   reachable vertex closest to it, or no route is returned at all.
//! * `safety`: minimizes `Σ length · 1 / (1 + β · coverage)`, unless the
//!   result is more than `cap` times longer than the default route.
//!
//! Costs are integer micrometers, so equal-length alternatives tie exactly
//! and ties resolve to the lexicographically smallest vertex-id sequence.

mod graph;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::CameraId;
use crate::geo::GeoPoint;
use crate::osm::{NodeId, WayId};

pub use graph::{build_graph, length_cost, Edge, EdgeSpec, RoutingGraph};
pub use search::{shortest_path, SearchPath};

/// Default reach of the privacy-mode snap, in meters.
pub const PRIVACY_SNAP_RADIUS_M: f64 = 500.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError {
    #[error("no vertex to snap to near {lat},{lon}")]
    NoSnapCandidate { lat: f64, lon: f64 },
    #[error("vertices {0} and {1} are not adjacent")]
    DisconnectedPath(NodeId, NodeId),
    #[error("way {way_id} references missing node {node_ref}")]
    Integrity { way_id: WayId, node_ref: NodeId },
    #[error("invalid route config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Default,
    Privacy,
    Safety,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Default => "default",
            Mode::Privacy => "privacy",
            Mode::Safety => "safety",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(Mode::Default),
            "privacy" => Ok(Mode::Privacy),
            "safety" => Ok(Mode::Safety),
            other => Err(format!("unknown mode {other:?} (expected default, privacy or safety)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteConfig {
    /// Safety discount per covering camera.
    pub beta: f64,
    /// Longest accepted safety route, as a multiple of the default route.
    pub cap: f64,
    pub privacy_snap_radius: f64,
}

impl Default for RouteConfig {
    fn default() -> Self {
        RouteConfig {
            beta: 1.0,
            cap: 1.6,
            privacy_snap_radius: PRIVACY_SNAP_RADIUS_M,
        }
    }
}

impl RouteConfig {
    pub fn validate(&self) -> Result<(), RouteError> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(RouteError::InvalidConfig(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.cap.is_finite() && self.cap >= 1.0) {
            return Err(RouteError::InvalidConfig(format!("cap must be >= 1, got {}", self.cap)));
        }
        if self.privacy_snap_radius.is_nan() || self.privacy_snap_radius <= 0.0 {
            return Err(RouteError::InvalidConfig(format!(
                "privacy snap radius must be > 0, got {}",
                self.privacy_snap_radius
            )));
        }
        Ok(())
    }

    /// Safety cost of an edge in micrometers, at least 1.
    pub fn safety_cost(&self, edge: &Edge) -> u64 {
        let w = 1.0 / (1.0 + self.beta * edge.coverage_count as f64);
        ((edge.length * 1e6 * w).round() as u64).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteRequest {
    pub from: GeoPoint,
    pub to: GeoPoint,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteStatus {
    Complete,
    Partial,
    None,
}

impl RouteStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RouteStatus::Complete => "complete",
            RouteStatus::Partial => "partial",
            RouteStatus::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub mode: Mode,
    pub status: RouteStatus,
    pub geometry: Vec<GeoPoint>,
    /// Node ids along the route.
    pub nodes: Vec<NodeId>,
    pub distance: f64,
    pub surveilled_distance: f64,
    pub cameras_passed: usize,
    pub snapped_from: GeoPoint,
    pub snapped_to: GeoPoint,
}

/// Surveilled length and distinct cameras over a path's edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exposure {
    pub surveilled_distance: f64,
    pub cameras_passed: usize,
}

/// Exposure of a vertex path. Consecutive vertices must be adjacent.
pub fn exposure(graph: &RoutingGraph, path: &[usize]) -> Result<Exposure, RouteError> {
    let edges = path
        .windows(2)
        .map(|w| {
            graph
                .edge_between(w[0], w[1])
                .ok_or_else(|| RouteError::DisconnectedPath(graph.node_id(w[0]), graph.node_id(w[1])))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(edge_exposure(graph, &edges))
}

pub fn edge_exposure(graph: &RoutingGraph, edges: &[usize]) -> Exposure {
    let mut surveilled_distance = 0.0;
    let mut cameras: BTreeSet<CameraId> = BTreeSet::new();
    for &e in edges {
        let edge = graph.edge(e);
        if edge.covered() {
            surveilled_distance += edge.length;
            cameras.extend(edge.cameras.iter().copied());
        }
    }
    Exposure {
        surveilled_distance,
        cameras_passed: cameras.len(),
    }
}

/// Nearest vertex to `p`, lowest id on ties. In privacy mode only vertices
/// with an uncovered incident edge within `config.privacy_snap_radius`
/// qualify.
pub fn snap(graph: &RoutingGraph, p: GeoPoint, mode: Mode, config: &RouteConfig) -> Result<usize, RouteError> {
    let q = graph.projection().project(p);
    let none = RouteError::NoSnapCandidate { lat: p.lat, lon: p.lon };
    let mut candidates = graph.nearest_vertices(q);
    match mode {
        Mode::Privacy => candidates
            .take_while(|&(_, d)| d <= config.privacy_snap_radius)
            .find(|&(v, _)| graph.has_uncovered_edge(v))
            .map(|(v, _)| v)
            .ok_or(none),
        _ => candidates.next().map(|(v, _)| v).ok_or(none),
    }
}

pub fn route(graph: &RoutingGraph, req: &RouteRequest, config: &RouteConfig) -> Result<RouteResult, RouteError> {
    config.validate()?;
    let source = snap(graph, req.from, req.mode, config)?;
    let target = snap(graph, req.to, Mode::Default, config)?;
    let any = |_: &Edge| true;
    let length = |e: &Edge| e.cost;

    let result = |status, path: Option<SearchPath>| {
        let (vertices, edges) = path.map_or((Vec::new(), Vec::new()), |p| (p.vertices, p.edges));
        assemble(graph, req.mode, status, &vertices, &edges, source, target)
    };

    if source == target {
        let trivial = SearchPath {
            vertices: vec![source],
            edges: Vec::new(),
            cost: 0,
        };
        return Ok(result(RouteStatus::Complete, Some(trivial)));
    }

    match req.mode {
        Mode::Default => {
            let path = shortest_path(graph, source, target, &any, &length);
            let status = if path.is_some() { RouteStatus::Complete } else { RouteStatus::None };
            Ok(result(status, path))
        }
        Mode::Privacy => {
            let open = |e: &Edge| !e.covered();
            let tree = search::search(graph, source, None, &open, &length);
            if tree.settled[target] {
                let path = search::path_to(graph, &tree, source, target, &open, &length);
                return Ok(result(RouteStatus::Complete, path));
            }
            if graph.has_uncovered_edge(target) {
                // The destination has open surroundings of its own, walled
                // off from the origin by fields of vision.
                return Ok(result(RouteStatus::None, None));
            }
            let goal = graph.projection().project(req.to);
            let closest = (0..graph.vertex_count())
                .filter(|&v| tree.settled[v])
                .map(|v| (graph.point(v).distance(goal), v))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, v)| v)
                .expect("origin is reachable from itself");
            let path = search::path_to(graph, &tree, source, closest, &open, &length);
            Ok(result(RouteStatus::Partial, path))
        }
        Mode::Safety => {
            let shortest = shortest_path(graph, source, target, &any, &length);
            let Some(shortest) = shortest else {
                return Ok(result(RouteStatus::None, None));
            };
            let weighted = |e: &Edge| config.safety_cost(e);
            let safe = shortest_path(graph, source, target, &any, &weighted)
                .expect("target reachable under any positive cost");
            let safe_len: u64 = safe.edges.iter().map(|&e| graph.edge(e).cost).sum();
            if safe_len as f64 > config.cap * shortest.cost as f64 {
                Ok(result(RouteStatus::Complete, Some(shortest)))
            } else {
                Ok(result(RouteStatus::Complete, Some(safe)))
            }
        }
    }
}

fn assemble(
    graph: &RoutingGraph,
    mode: Mode,
    status: RouteStatus,
    vertices: &[usize],
    edges: &[usize],
    source: usize,
    target: usize,
) -> RouteResult {
    let exp = edge_exposure(graph, edges);
    RouteResult {
        mode,
        status,
        geometry: vertices.iter().map(|&v| graph.location(v)).collect(),
        nodes: vertices.iter().map(|&v| graph.node_id(v)).collect(),
        distance: edges.iter().fold(0.0, |acc, &e| acc + graph.edge(e).length),
        surveilled_distance: exp.surveilled_distance,
        cameras_passed: exp.cameras_passed,
        snapped_from: graph.location(source),
        snapped_to: graph.location(target),
    }
}
