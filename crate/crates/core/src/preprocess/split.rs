use crate::geo::{offset_polyline_grouped, GeoError, Side};
use crate::osm::{NodeId, Tags, WayId};

use super::{Augmenter, PreprocessError, SplitWaySet, TAG_PARENT, TAG_SIDE};

impl Augmenter {
    /// Splits a way into left, middle and right ways `width / 2` apart.
    ///
    /// The original way stays in place as the middle way. Connector ways
    /// `left-middle-right` are added at both ends and at every interior
    /// node shared with another travellable way, so a route can change sides
    /// there.
    pub fn split_way(&mut self, way_id: WayId, width: f64) -> Result<SplitWaySet, PreprocessError> {
        let way = self.model.ways[&way_id].clone();
        let offset = width / 2.0;
        let points = self.way_points(&way);
        if points.windows(2).all(|w| w[0] == w[1]) {
            return Err(GeoError::DegenerateGeometry(format!("way {way_id} has zero length")).into());
        }
        let left_groups = offset_polyline_grouped(&points, offset, Side::Left)?;
        let right_groups = offset_polyline_grouped(&points, offset, Side::Right)?;

        let last = way.node_refs.len() - 1;
        let is_junction = |i: usize, usage: &std::collections::HashMap<NodeId, u32>| {
            i == 0 || i == last || usage.get(&way.node_refs[i]).copied().unwrap_or(0) > 1
        };
        let junctions: Vec<usize> = (0..=last).filter(|&i| is_junction(i, &self.usage)).collect();

        let parent = way_id.to_string();
        let side_way = |this: &mut Augmenter, side: &str, groups: Vec<Vec<crate::geo::LocalPoint>>| {
            let mut refs = Vec::new();
            let mut anchor = Vec::with_capacity(groups.len());
            for group in groups {
                anchor.push(refs.len());
                for p in group {
                    refs.push(this.add_node(p, Tags::new()));
                }
            }
            let mut tags = way.tags.clone();
            tags.insert(TAG_SIDE, side);
            tags.insert(TAG_PARENT, parent.as_str());
            let anchors: Vec<NodeId> = anchor.iter().map(|&k| refs[k]).collect();
            let id = this.add_way(refs, tags);
            (id, anchors)
        };
        let (left_way_id, left_anchor) = side_way(self, "left", left_groups);
        let (right_way_id, right_anchor) = side_way(self, "right", right_groups);

        let middle = self.model.ways.get_mut(&way_id).expect("way exists");
        middle.tags.insert(TAG_SIDE, "middle");
        middle.tags.insert(TAG_PARENT, parent.as_str());

        let mut connector_way_ids = Vec::with_capacity(junctions.len());
        for i in junctions {
            let mut tags = Tags::new();
            tags.insert("highway", "footway");
            tags.insert(TAG_SIDE, "connector");
            tags.insert(TAG_PARENT, parent.as_str());
            let refs = vec![left_anchor[i], way.node_refs[i], right_anchor[i]];
            connector_way_ids.push(self.add_way(refs, tags));
        }

        Ok(SplitWaySet {
            original_way_id: way_id,
            left_way_id,
            middle_way_id: way_id,
            right_way_id,
            offset,
            connector_way_ids,
        })
    }
}
