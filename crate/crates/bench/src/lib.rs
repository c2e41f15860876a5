//! Shared fixtures for the benchmarks.

use cctv_core::synth::{generate_grid, SynthConfig, SynthMap};
use cctv_core::{augment, build_graph, AugmentedModel, GeoPoint, PreprocessConfig, RoutingGraph};

pub fn grid(side: usize, cameras: usize) -> SynthMap {
    generate_grid(&SynthConfig::new(side, side, 40.0, cameras, 42)).expect("synthetic grid")
}

pub fn dataset(side: usize, cameras: usize) -> (AugmentedModel, RoutingGraph) {
    let map = grid(side, cameras);
    let aug = augment(&map.model, &map.cameras, &PreprocessConfig::default()).expect("augment");
    let graph = build_graph(&aug).expect("graph");
    (aug, graph)
}

/// Opposite corners of the grid, slightly off the junctions.
pub fn corners(graph: &RoutingGraph) -> (GeoPoint, GeoPoint) {
    let (mut lo, mut hi) = (graph.location(0), graph.location(0));
    for v in 0..graph.vertex_count() {
        let p = graph.location(v);
        if p.lat + p.lon < lo.lat + lo.lon {
            lo = p;
        }
        if p.lat + p.lon > hi.lat + hi.lon {
            hi = p;
        }
    }
    let nudge = |p: GeoPoint, d: f64| GeoPoint {
        lat: p.lat + d,
        lon: p.lon + d,
    };
    (nudge(lo, 1e-5), nudge(hi, -1e-5))
}
