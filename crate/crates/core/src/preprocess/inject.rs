use crate::geo::{intersect_segment_polygon, FovPolygon};
use crate::osm::{NodeId, Tags, WayId};

use super::{Augmenter, ENDPOINT_SNAP_M, TAG_CAMERA};

impl Augmenter {
    /// Inserts an entrance/exit node wherever the way crosses the ring of
    /// `fov` and re-threads the way through them. Crossings that land on an
    /// existing way node tag that node instead. Returns the number of nodes
    /// created.
    pub fn inject_boundary_nodes(&mut self, way_id: WayId, fov: &FovPolygon) -> usize {
        let refs = self.model.ways[&way_id].node_refs.clone();
        let mut threaded: Vec<NodeId> = Vec::with_capacity(refs.len() + 2);
        threaded.push(refs[0]);
        let mut created = 0;

        for seg in refs.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let (pa, pb) = (self.local[&a], self.local[&b]);
            let hits = intersect_segment_polygon(pa, pb, fov);
            for c in &hits.crossings {
                let along = c.t * hits.length;
                if along <= ENDPOINT_SNAP_M {
                    self.mark_boundary(a, fov);
                } else if hits.length - along <= ENDPOINT_SNAP_M {
                    self.mark_boundary(b, fov);
                } else {
                    let mut tags = Tags::new();
                    tags.insert("access", "surveillance");
                    tags.insert(TAG_CAMERA, fov.camera_id.to_string());
                    let id = self.add_node(c.point, tags);
                    threaded.push(id);
                    created += 1;
                }
            }
            threaded.push(b);
        }

        if created > 0 {
            self.model.ways.get_mut(&way_id).expect("way exists").node_refs = threaded;
        }
        created
    }

    fn mark_boundary(&mut self, node: NodeId, fov: &FovPolygon) {
        let tags = &mut self.model.nodes.get_mut(&node).expect("node exists").tags;
        tags.insert("access", "surveillance");
        let id = fov.camera_id.to_string();
        let merged = match tags.get(TAG_CAMERA) {
            Some(existing) if existing.split(';').any(|c| c == id) => existing.to_string(),
            Some(existing) => format!("{existing};{id}"),
            None => id,
        };
        tags.insert(TAG_CAMERA, merged);
    }
}
