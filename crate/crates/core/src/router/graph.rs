use std::collections::{BTreeMap, HashMap};

use rstar::primitives::GeomWithData;
use rstar::RTree;

use crate::camera::CameraId;
use crate::geo::{GeoPoint, LocalPoint, Projection};
use crate::osm::{NodeId, WayId};
use crate::preprocess::{edge_key, AugmentedModel};

use super::RouteError;

type IndexedPoint = GeomWithData<[f64; 2], usize>;

/// Integer edge cost: length in micrometers, at least 1.
pub fn length_cost(length: f64) -> u64 {
    ((length * 1e6).round() as u64).max(1)
}

/// An undirected edge between two vertex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// `length` in micrometers.
    pub cost: u64,
    pub coverage_count: u32,
    pub cameras: Vec<CameraId>,
    pub way_id: WayId,
}

impl Edge {
    pub fn covered(&self) -> bool {
        self.coverage_count > 0
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.from {
            self.to
        } else {
            self.from
        }
    }
}

/// Routing graph over the travellable ways of an augmented model.
///
/// Vertices are indexed in ascending node id order, so comparing indices
/// compares ids.
#[derive(Debug, Clone)]
pub struct RoutingGraph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    points: Vec<LocalPoint>,
    locations: Vec<GeoPoint>,
    edges: Vec<Edge>,
    /// Per vertex: `(neighbor, edge)` sorted ascending.
    adjacency: Vec<Vec<(usize, usize)>>,
    tree: RTree<IndexedPoint>,
    projection: Projection,
}

/// Raw edge description for [`RoutingGraph::from_parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub from: NodeId,
    pub to: NodeId,
    pub coverage_count: u32,
    pub cameras: Vec<CameraId>,
    pub way_id: WayId,
}

impl RoutingGraph {
    pub fn build(augmented: &AugmentedModel) -> Result<RoutingGraph, RouteError> {
        build_graph(augmented)
    }

    /// Assembles a graph from explicit vertices and edges. Edge lengths are
    /// the distances between the projected vertices.
    pub fn from_parts(
        projection: Projection,
        vertices: impl IntoIterator<Item = (NodeId, GeoPoint)>,
        edges: impl IntoIterator<Item = EdgeSpec>,
    ) -> Result<RoutingGraph, RouteError> {
        let mut sorted: Vec<(NodeId, GeoPoint)> = vertices.into_iter().collect();
        sorted.sort_by_key(|v| v.0);
        sorted.dedup_by_key(|v| v.0);
        let ids: Vec<NodeId> = sorted.iter().map(|v| v.0).collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let locations: Vec<GeoPoint> = sorted.iter().map(|v| v.1).collect();
        let points: Vec<LocalPoint> = locations.iter().map(|&g| projection.project(g)).collect();

        let mut adjacency = vec![Vec::new(); ids.len()];
        let mut out_edges = Vec::new();
        for spec in edges {
            let lookup = |id: NodeId| {
                index.get(&id).copied().ok_or(RouteError::Integrity {
                    way_id: spec.way_id,
                    node_ref: id,
                })
            };
            let (a, b) = (lookup(spec.from)?, lookup(spec.to)?);
            if a == b {
                continue;
            }
            let length = points[a].distance(points[b]);
            let e = out_edges.len();
            out_edges.push(Edge {
                from: a,
                to: b,
                length,
                cost: length_cost(length),
                coverage_count: spec.coverage_count,
                cameras: spec.cameras,
                way_id: spec.way_id,
            });
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let tree = RTree::bulk_load(
            points
                .iter()
                .enumerate()
                .map(|(i, p)| IndexedPoint::new([p.x, p.y], i))
                .collect(),
        );
        Ok(RoutingGraph {
            ids,
            index,
            points,
            locations,
            edges: out_edges,
            adjacency,
            tree,
            projection,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn node_id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    pub fn vertex(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn point(&self, v: usize) -> LocalPoint {
        self.points[v]
    }

    pub fn location(&self, v: usize) -> GeoPoint {
        self.locations[v]
    }

    /// `(neighbor, edge)` pairs of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    /// Whether `v` has at least one incident edge outside every field of vision.
    pub fn has_uncovered_edge(&self, v: usize) -> bool {
        self.adjacency[v].iter().any(|&(_, e)| !self.edges[e].covered())
    }

    /// Lowest-index edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let adj = &self.adjacency[a];
        let at = adj.partition_point(|&(n, _)| n < b);
        adj.get(at).filter(|&&(n, _)| n == b).map(|&(_, e)| e)
    }

    /// Vertices ordered by distance from `p`, closest first. Vertices at the
    /// same distance come out in ascending index order.
    pub fn nearest_vertices(&self, p: LocalPoint) -> impl Iterator<Item = (usize, f64)> + '_ {
        let mut inner = self
            .tree
            .nearest_neighbor_iter_with_distance_2(&[p.x, p.y])
            .map(|(g, d2)| (g.data, d2))
            .peekable();
        let mut batch: Vec<(usize, f64)> = Vec::new();
        std::iter::from_fn(move || {
            if batch.is_empty() {
                let (v, d2) = inner.next()?;
                batch.push((v, d2));
                while let Some(&(w, e2)) = inner.peek() {
                    if e2 != d2 {
                        break;
                    }
                    batch.push((w, e2));
                    inner.next();
                }
                batch.sort_by_key(|b| std::cmp::Reverse(b.0));
            }
            batch.pop().map(|(v, d2)| (v, d2.sqrt()))
        })
    }
}

/// One edge per consecutive node pair of every travellable way, with
/// coverage taken from the model's weight table.
pub fn build_graph(augmented: &AugmentedModel) -> Result<RoutingGraph, RouteError> {
    let model = &augmented.model;
    let coverage: BTreeMap<(NodeId, NodeId), u32> = augmented
        .weights
        .iter()
        .map(|w| ((w.from_node, w.to_node), w.coverage_count))
        .collect();

    let mut vertices = BTreeMap::new();
    let mut specs = Vec::new();
    for way in model.ways.values().filter(|w| w.is_travellable()) {
        for &r in &way.node_refs {
            let node = model.nodes.get(&r).ok_or(RouteError::Integrity {
                way_id: way.id,
                node_ref: r,
            })?;
            vertices.insert(r, node.location);
        }
        for s in way.node_refs.windows(2) {
            let key = edge_key(s[0], s[1]);
            specs.push(EdgeSpec {
                from: s[0],
                to: s[1],
                coverage_count: coverage.get(&key).copied().unwrap_or(0),
                cameras: augmented.edge_cameras.get(&key).cloned().unwrap_or_default(),
                way_id: way.id,
            });
        }
    }
    RoutingGraph::from_parts(augmented.projection, vertices, specs)
}
