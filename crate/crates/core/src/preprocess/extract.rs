use std::collections::{BTreeSet, HashMap};

use crate::geo::{point_segment_distance, GeoPoint, LocalPoint, Projection};
use crate::osm::{NodeId, OsmModel, WayId};

/// Ways with a node inside the circle, or a segment passing through it.
pub(super) fn ways_near(
    model: &OsmModel,
    local: &HashMap<NodeId, LocalPoint>,
    center: LocalPoint,
    radius: f64,
) -> Vec<WayId> {
    model
        .ways
        .values()
        .filter(|way| {
            let pts: Vec<LocalPoint> = way.node_refs.iter().map(|r| local[r]).collect();
            pts.iter().any(|p| p.distance(center) <= radius)
                || pts
                    .windows(2)
                    .any(|s| point_segment_distance(center, s[0], s[1]) <= radius)
        })
        .map(|w| w.id)
        .collect()
}

/// Sub-model of everything within `radius` meters of `center`.
///
/// A way is included whole (with all of its nodes) when any of its nodes lies
/// inside the circle or any of its segments passes through it, so every way
/// that meets the circle is present. Loose nodes inside the circle are kept
/// as well.
pub fn create_local_extract(model: &OsmModel, center: GeoPoint, radius: f64) -> OsmModel {
    let Ok(projection) = Projection::new(center) else {
        return OsmModel::new();
    };
    let local: HashMap<NodeId, LocalPoint> = model
        .nodes
        .values()
        .map(|n| (n.id, projection.project(n.location)))
        .collect();
    let origin = LocalPoint::default();

    let mut out = OsmModel::new();
    let mut keep: BTreeSet<NodeId> = local
        .iter()
        .filter(|(_, p)| p.distance(origin) <= radius)
        .map(|(&id, _)| id)
        .collect();
    for way_id in ways_near(model, &local, origin, radius) {
        let way = &model.ways[&way_id];
        keep.extend(way.node_refs.iter().copied());
        out.ways.insert(way_id, way.clone());
    }
    for id in keep {
        out.nodes.insert(id, model.nodes[&id].clone());
    }
    out
}
