use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::graph::{Edge, RoutingGraph};

/// Result of a one-to-one search: vertex and edge sequences and total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub cost: u64,
}

/// Settled distances of a uniform-cost search from `source`.
pub(crate) struct Tree {
    pub dist: Vec<Option<u64>>,
    pub settled: Vec<bool>,
}

/// Uniform-cost search over edges passing `allowed`, priced by `cost`. Stops
/// once `target` is settled; with no target every reachable vertex is settled.
pub(crate) fn search(
    graph: &RoutingGraph,
    source: usize,
    target: Option<usize>,
    allowed: &dyn Fn(&Edge) -> bool,
    cost: &dyn Fn(&Edge) -> u64,
) -> Tree {
    let n = graph.vertex_count();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));

    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if Some(u) == target {
            break;
        }
        for &(v, e) in graph.neighbors(u) {
            let edge = graph.edge(e);
            if settled[v] || !allowed(edge) {
                continue;
            }
            let nd = d + cost(edge);
            if dist[v].is_none_or(|old| nd < old) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Tree { dist, settled }
}

/// Cheapest path from `source` to `target`; among equally cheap paths, the
/// one with the lexicographically smallest vertex sequence.
pub fn shortest_path(
    graph: &RoutingGraph,
    source: usize,
    target: usize,
    allowed: &dyn Fn(&Edge) -> bool,
    cost: &dyn Fn(&Edge) -> u64,
) -> Option<SearchPath> {
    let tree = search(graph, source, Some(target), allowed, cost);
    path_to(graph, &tree, source, target, allowed, cost)
}

pub(crate) fn path_to(
    graph: &RoutingGraph,
    tree: &Tree,
    source: usize,
    target: usize,
    allowed: &dyn Fn(&Edge) -> bool,
    cost: &dyn Fn(&Edge) -> u64,
) -> Option<SearchPath> {
    if !tree.settled[target] {
        return None;
    }
    let total = tree.dist[target]?;
    let tight = |u: usize, v: usize, e: usize| -> bool {
        let edge = graph.edge(e);
        allowed(edge)
            && tree.settled[u]
            && tree.settled[v]
            && matches!((tree.dist[u], tree.dist[v]), (Some(du), Some(dv)) if du + cost(edge) == dv)
    };

    // Vertices on some cheapest path, found backwards from the target.
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &(u, e) in graph.neighbors(v) {
            if !on_path[u] && tight(u, v, e) {
                on_path[u] = true;
                stack.push(u);
            }
        }
    }

    // Walk forwards, always taking the smallest next vertex.
    let mut vertices = vec![source];
    let mut edges = Vec::new();
    let mut u = source;
    while u != target {
        let &(v, e) = graph
            .neighbors(u)
            .iter()
            .find(|&&(v, e)| on_path[v] && tight(u, v, e))
            .expect("cheapest-path subgraph reaches the target");
        vertices.push(v);
        edges.push(e);
        u = v;
    }
    Some(SearchPath {
        vertices,
        edges,
        cost: total,
    })
}
