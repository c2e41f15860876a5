use std::collections::{BTreeMap, HashMap};

use crate::camera::CameraId;
use crate::geo::{point_in_polygon, FovPolygon, LocalPoint};
use crate::osm::{NodeId, OsmModel};

use super::{edge_key, AugmentedModel, PreprocessError, WeightRow};

/// Cameras seeing each edge of every travellable way, judged at the edge
/// midpoint. Only edges seen by at least one camera are returned.
pub(super) fn classify_edges(
    model: &OsmModel,
    local: &HashMap<NodeId, LocalPoint>,
    fov_index: &BTreeMap<CameraId, FovPolygon>,
) -> BTreeMap<(NodeId, NodeId), Vec<CameraId>> {
    let mut out = BTreeMap::new();
    if fov_index.is_empty() {
        return out;
    }
    for way in model.ways.values().filter(|w| w.is_travellable()) {
        for seg in way.node_refs.windows(2) {
            let key = edge_key(seg[0], seg[1]);
            if out.contains_key(&key) {
                continue;
            }
            let mid = local[&seg[0]].midpoint(local[&seg[1]]);
            let cams: Vec<CameraId> = fov_index
                .values()
                .filter(|f| point_in_polygon(mid, f))
                .map(|f| f.camera_id)
                .collect();
            if !cams.is_empty() {
                out.insert(key, cams);
            }
        }
    }
    out
}

/// Coverage table as CSV: `from,to,coverage`, one row per direction, sorted.
pub fn emit_weights(augmented: &AugmentedModel) -> Vec<u8> {
    let mut rows: Vec<(NodeId, NodeId, u32)> = augmented
        .weights
        .iter()
        .flat_map(|w| {
            [
                (w.from_node, w.to_node, w.coverage_count),
                (w.to_node, w.from_node, w.coverage_count),
            ]
        })
        .collect();
    rows.sort_unstable();
    rows.dedup();
    let mut out = String::from("from,to,coverage\n");
    for (a, b, c) in rows {
        out.push_str(&format!("{a},{b},{c}\n"));
    }
    out.into_bytes()
}

/// Reads a table written by [`emit_weights`] back into undirected rows.
pub fn parse_weights(bytes: &[u8]) -> Result<Vec<WeightRow>, PreprocessError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| PreprocessError::Weights(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| PreprocessError::Weights(format!("missing column {name:?}")))
    };
    let (from_col, to_col, cov_col) = (col("from")?, col("to")?, col("coverage")?);

    let mut merged: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PreprocessError::Weights(e.to_string()))?;
        let bad = || PreprocessError::Weights(format!("row {}: malformed values", i + 1));
        let from: NodeId = record.get(from_col).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let to: NodeId = record.get(to_col).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let coverage: u32 = record.get(cov_col).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if coverage == 0 {
            return Err(PreprocessError::Weights(format!(
                "row {}: coverage must be at least 1",
                i + 1
            )));
        }
        let slot = merged.entry(edge_key(from, to)).or_default();
        *slot = (*slot).max(coverage);
    }
    Ok(merged
        .into_iter()
        .map(|((from_node, to_node), coverage_count)| WeightRow {
            from_node,
            to_node,
            coverage_count,
        })
        .collect())
}
