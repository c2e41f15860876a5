use serde::{Deserialize, Serialize};

use super::point::LocalPoint;
use super::GeoError;

/// Miter joins longer than this multiple of the offset distance become bevels.
pub const MITER_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn unit_normal(self, dir: LocalPoint) -> LocalPoint {
        match self {
            Side::Left => LocalPoint::new(-dir.y, dir.x),
            Side::Right => LocalPoint::new(dir.y, -dir.x),
        }
    }
}

/// Offsets `line` sideways by `distance` with miter joins.
pub fn offset_polyline(
    line: &[LocalPoint],
    distance: f64,
    side: Side,
) -> Result<Vec<LocalPoint>, GeoError> {
    Ok(offset_polyline_grouped(line, distance, side)?
        .into_iter()
        .flatten()
        .collect())
}

/// Same as [`offset_polyline`], keeping the output points produced for each
/// input vertex together: one point for a miter, two for a bevel.
pub fn offset_polyline_grouped(
    line: &[LocalPoint],
    distance: f64,
    side: Side,
) -> Result<Vec<Vec<LocalPoint>>, GeoError> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(GeoError::DegenerateGeometry(format!(
            "offset distance must be positive, got {distance}"
        )));
    }
    if line.len() < 2 {
        return Err(GeoError::DegenerateGeometry(
            "polyline needs at least two points".into(),
        ));
    }

    let dirs: Vec<Option<LocalPoint>> = line
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let len = d.norm();
            (len > 0.0).then(|| d * (1.0 / len))
        })
        .collect();
    if dirs.iter().all(Option::is_none) {
        return Err(GeoError::DegenerateGeometry(
            "polyline has zero length".into(),
        ));
    }

    let mut groups = Vec::with_capacity(line.len());
    for (i, &p) in line.iter().enumerate() {
        let prev = dirs[..i].iter().rev().find_map(|d| *d);
        let next = dirs[i..].iter().find_map(|d| *d);
        let group = match (prev, next) {
            (Some(u), None) | (None, Some(u)) => vec![p + side.unit_normal(u) * distance],
            (Some(up), Some(un)) => {
                let np = side.unit_normal(up);
                let nn = side.unit_normal(un);
                let denom = 1.0 + up.dot(un);
                let ratio_sq = if denom > 0.0 { 2.0 / denom } else { f64::INFINITY };
                if ratio_sq <= MITER_LIMIT * MITER_LIMIT {
                    vec![p + (np + nn) * (distance / denom)]
                } else {
                    vec![p + np * distance, p + nn * distance]
                }
            }
            (None, None) => unreachable!("at least one segment has length"),
        };
        groups.push(group);
    }
    Ok(groups)
}

pub fn polyline_length(line: &[LocalPoint]) -> f64 {
    line.windows(2).fold(0.0, |acc, w| acc + w[0].distance(w[1]))
}
