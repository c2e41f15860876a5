//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use cctv_core::geo::LocalPoint;
use cctv_core::osm::{OsmModel, Tags};
use cctv_core::GeoPoint;
use rand::Rng;

/// Even-odd ray cast towards +x. No boundary handling.
pub fn ray_cast(p: LocalPoint, ring: &[LocalPoint]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn seg_dist(p: LocalPoint, a: LocalPoint, b: LocalPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / l2).clamp(0.0, 1.0)
    };
    ((p.x - a.x - t * dx).powi(2) + (p.y - a.y - t * dy).powi(2)).sqrt()
}

pub fn boundary_distance(p: LocalPoint, ring: &[LocalPoint]) -> f64 {
    (0..ring.len())
        .map(|i| seg_dist(p, ring[i], ring[(i + 1) % ring.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Parameters in (0, 1) where `a → b` meets a ring edge (proper crossings).
fn cut_params(a: LocalPoint, b: LocalPoint, ring: &[LocalPoint]) -> Vec<f64> {
    let mut ts = vec![0.0, 1.0];
    let (rx, ry) = (b.x - a.x, b.y - a.y);
    for i in 0..ring.len() {
        let (p, q) = (ring[i], ring[(i + 1) % ring.len()]);
        let (sx, sy) = (q.x - p.x, q.y - p.y);
        let den = rx * sy - ry * sx;
        if den == 0.0 {
            continue;
        }
        let t = ((p.x - a.x) * sy - (p.y - a.y) * sx) / den;
        let u = ((p.x - a.x) * ry - (p.y - a.y) * rx) / den;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts
}

/// Length of `a → b` strictly inside `ring`, by cutting at every ring edge
/// and ray casting each piece's midpoint.
pub fn inside_length(a: LocalPoint, b: LocalPoint, ring: &[LocalPoint]) -> f64 {
    let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let ts = cut_params(a, b, ring);
    ts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| ray_cast(a.lerp(b, (w[0] + w[1]) / 2.0), ring))
        .map(|w| (w[1] - w[0]) * len)
        .sum()
}

/// Like [`inside_length`] but with boundary points counting as inside, so a
/// piece running along the ring is covered.
pub fn closed_inside_length(a: LocalPoint, b: LocalPoint, ring: &[LocalPoint]) -> f64 {
    let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let ts = cut_params(a, b, ring);
    ts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| {
            let m = a.lerp(b, (w[0] + w[1]) / 2.0);
            ray_cast(m, ring) || boundary_distance(m, ring) <= 1e-9
        })
        .map(|w| (w[1] - w[0]) * len)
        .sum()
}

/// How deep `a → b` reaches into the interior of `ring`, sampling every
/// inside piece. Zero when the segment stays outside or on the boundary.
pub fn penetration(a: LocalPoint, b: LocalPoint, ring: &[LocalPoint]) -> f64 {
    let ts = cut_params(a, b, ring);
    let mut depth: f64 = 0.0;
    for w in ts.windows(2).filter(|w| w[1] > w[0]) {
        for k in 1..8 {
            let p = a.lerp(b, w[0] + (w[1] - w[0]) * k as f64 / 8.0);
            if ray_cast(p, ring) {
                depth = depth.max(boundary_distance(p, ring));
            }
        }
    }
    depth
}

/// O(V²) Dijkstra without a heap on an undirected edge list.
pub fn naive_dijkstra(n: usize, edges: &[(usize, usize, u64)], source: usize) -> Vec<Option<u64>> {
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for &(a, b, c) in edges {
        adj[a].push((b, c));
        adj[b].push((a, c));
    }
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut done = vec![false; n];
    dist[source] = Some(0);
    loop {
        let mut best: Option<(u64, usize)> = None;
        for v in 0..n {
            if let (false, Some(d)) = (done[v], dist[v]) {
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, v));
                }
            }
        }
        let Some((d, u)) = best else { break };
        done[u] = true;
        for &(v, c) in &adj[u] {
            if dist[v].is_none_or(|old| d + c < old) {
                dist[v] = Some(d + c);
            }
        }
    }
    dist
}

/// Micrometer cost computed from coordinates.
pub fn um(a: LocalPoint, b: LocalPoint) -> u64 {
    let d = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    ((d * 1e6).round() as u64).max(1)
}

const TAG_CHARS: &[char] = &['a', 'Z', '7', ' ', '&', '<', '>', '"', '\'', ':', ';', 'ä', '→', '\t', '\n'];

fn random_text(rng: &mut impl Rng, max: usize) -> String {
    let n = rng.random_range(1..=max);
    (0..n).map(|_| TAG_CHARS[rng.random_range(0..TAG_CHARS.len())]).collect()
}

/// Random valid model: 7-decimal coordinates, awkward tag text, ways over
/// existing nodes without consecutive repeats.
pub fn random_model(rng: &mut impl Rng) -> OsmModel {
    let mut model = OsmModel::new();
    let n = rng.random_range(0..30);
    let mut ids = Vec::new();
    for _ in 0..n {
        let id: i64 = rng.random_range(-1000..1000);
        let lat = (rng.random_range(-90.0..=90.0f64) * 1e7).round() / 1e7;
        let lon = (rng.random_range(-180.0..=180.0f64) * 1e7).round() / 1e7;
        let tags: Tags = (0..rng.random_range(0..4))
            .map(|i| (format!("k{i}:{}", random_text(rng, 3).replace(['\t', '\n'], "")), random_text(rng, 8)))
            .collect();
        model.add_node(id, GeoPoint { lat, lon }, tags);
        ids.push(id);
    }
    ids.sort();
    ids.dedup();
    if ids.len() >= 2 {
        for w in 0..rng.random_range(0..8) {
            let len = rng.random_range(2..6);
            let mut refs: Vec<i64> = Vec::new();
            while refs.len() < len {
                let r = ids[rng.random_range(0..ids.len())];
                if refs.last() != Some(&r) {
                    refs.push(r);
                }
            }
            let tags: Tags = [("highway", "residential"), ("name", "Kauppakatu & <Väinönkatu>")]
                .into_iter()
                .take(rng.random_range(0..3))
                .collect();
            model.add_way(w as i64 + 1, refs, tags);
        }
    }
    model
}
