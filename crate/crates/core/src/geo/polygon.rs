use serde::Serialize;

use super::point::LocalPoint;
use crate::camera::CameraId;

/// Distance under which a point counts as lying on a ring edge.
pub const BOUNDARY_EPS_M: f64 = 1e-9;

/// Inside intervals shorter than this (in meters of segment length) are grazing
/// contacts and are reported as outside.
pub const GRAZING_EPS_M: f64 = 1e-9;

/// Axis-aligned bounding box in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aabb {
    pub min: LocalPoint,
    pub max: LocalPoint,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a LocalPoint>) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn expanded(&self, margin: f64) -> Aabb {
        Aabb {
            min: LocalPoint::new(self.min.x - margin, self.min.y - margin),
            max: LocalPoint::new(self.max.x + margin, self.max.y + margin),
        }
    }
}

/// Planar ring approximating the area a camera surveys.
///
/// Vertices are stored counter-clockwise without repeating the first vertex;
/// the closing edge is implicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FovPolygon {
    pub camera_id: CameraId,
    pub apex: LocalPoint,
    pub radius: f64,
    pub vertices: Vec<LocalPoint>,
    bbox: Aabb,
}

impl FovPolygon {
    /// Wraps a ring. Panics if `vertices` is empty.
    pub fn from_ring(
        camera_id: CameraId,
        apex: LocalPoint,
        radius: f64,
        vertices: Vec<LocalPoint>,
    ) -> Self {
        let bbox = Aabb::from_points(&vertices).expect("ring must not be empty");
        FovPolygon {
            camera_id,
            apex,
            radius,
            vertices,
            bbox,
        }
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn edges(&self) -> impl Iterator<Item = (LocalPoint, LocalPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(p, q)| p.cross(q)).sum::<f64>() / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn distance_to_boundary(&self, p: LocalPoint) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: LocalPoint) -> bool {
        point_in_polygon(p, self)
    }
}

pub fn point_segment_distance(p: LocalPoint, a: LocalPoint, b: LocalPoint) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a.lerp(b, t))
}

/// Even-odd containment. Points on the ring count as inside.
pub fn point_in_polygon(p: LocalPoint, poly: &FovPolygon) -> bool {
    let bb = poly.bbox.expanded(BOUNDARY_EPS_M);
    if p.x < bb.min.x || p.x > bb.max.x || p.y < bb.min.y || p.y > bb.max.y {
        return false;
    }
    let mut inside = false;
    for (a, b) in poly.edges() {
        if point_segment_distance(p, a, b) <= BOUNDARY_EPS_M {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_at {
                inside = !inside;
            }
        }
    }
    inside
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    /// Fraction along the segment, in `[0, 1]`.
    pub t: f64,
    pub point: LocalPoint,
}

/// A maximal run of the segment with uniform inside/outside status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub t0: f64,
    pub t1: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentCrossings {
    /// Status transitions, sorted by `t`. Status alternates across each one.
    pub crossings: Vec<Crossing>,
    pub intervals: Vec<Interval>,
    pub length: f64,
}

impl SegmentCrossings {
    pub fn starts_inside(&self) -> bool {
        self.intervals.first().is_some_and(|i| i.inside)
    }

    pub fn ends_inside(&self) -> bool {
        self.intervals.last().is_some_and(|i| i.inside)
    }

    pub fn inside_length(&self) -> f64 {
        self.intervals
            .iter()
            .filter(|i| i.inside)
            .map(|i| (i.t1 - i.t0) * self.length)
            .sum()
    }
}

/// Splits segment `a → b` at every transition into or out of `poly`.
///
/// Candidate parameters come from every ring-edge intersection (including the
/// ends of collinear overlaps); each sub-interval is classified by its
/// midpoint, so tangential touches never produce a transition.
pub fn intersect_segment_polygon(a: LocalPoint, b: LocalPoint, poly: &FovPolygon) -> SegmentCrossings {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return SegmentCrossings {
            crossings: Vec::new(),
            intervals: vec![Interval {
                t0: 0.0,
                t1: 1.0,
                inside: point_in_polygon(a, poly),
            }],
            length: 0.0,
        };
    }

    let seg_box = Aabb::from_points(&[a, b]).unwrap();
    if !seg_box.intersects(&poly.bbox.expanded(BOUNDARY_EPS_M)) {
        return SegmentCrossings {
            crossings: Vec::new(),
            intervals: vec![Interval {
                t0: 0.0,
                t1: 1.0,
                inside: false,
            }],
            length: len,
        };
    }

    let len2 = len * len;
    let mut ts = vec![0.0, 1.0];
    for (p, q) in poly.edges() {
        let e = q - p;
        let denom = d.cross(e);
        let ap = p - a;
        if denom.abs() > 1e-12 * len * e.norm().max(f64::MIN_POSITIVE) {
            let t = ap.cross(e) / denom;
            let s = ap.cross(d) / denom;
            if (-1e-12..=1.0 + 1e-12).contains(&s) && (0.0..=1.0).contains(&t) {
                ts.push(t);
            }
        } else if ap.cross(d).abs() <= BOUNDARY_EPS_M * len {
            for r in [p, q] {
                let t = (r - a).dot(d) / len2;
                if (0.0..=1.0).contains(&t) {
                    ts.push(t);
                }
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() * len < 1e-12);

    let mut intervals: Vec<Interval> = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let inside = point_in_polygon(a.lerp(b, (t0 + t1) / 2.0), poly);
        push_merged(&mut intervals, Interval { t0, t1, inside });
    }
    if intervals.is_empty() {
        intervals.push(Interval {
            t0: 0.0,
            t1: 1.0,
            inside: point_in_polygon(a.midpoint(b), poly),
        });
    }

    // Grazing tie-break: drop slivers of inside, then close slivers of outside
    // sandwiched between two inside runs.
    let mut cleaned: Vec<Interval> = Vec::with_capacity(intervals.len());
    for mut iv in intervals {
        if iv.inside && (iv.t1 - iv.t0) * len < GRAZING_EPS_M {
            iv.inside = false;
        }
        push_merged(&mut cleaned, iv);
    }
    let mut intervals: Vec<Interval> = Vec::with_capacity(cleaned.len());
    for (i, iv) in cleaned.iter().enumerate() {
        let mut iv = *iv;
        let sandwiched = i > 0
            && i + 1 < cleaned.len()
            && cleaned[i - 1].inside
            && cleaned[i + 1].inside;
        if !iv.inside && sandwiched && (iv.t1 - iv.t0) * len < GRAZING_EPS_M {
            iv.inside = true;
        }
        push_merged(&mut intervals, iv);
    }

    let crossings = intervals
        .windows(2)
        .map(|w| Crossing {
            t: w[1].t0,
            point: a.lerp(b, w[1].t0),
        })
        .collect();

    SegmentCrossings {
        crossings,
        intervals,
        length: len,
    }
}

fn push_merged(out: &mut Vec<Interval>, iv: Interval) {
    match out.last_mut() {
        Some(last) if last.inside == iv.inside => last.t1 = iv.t1,
        _ => out.push(iv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(radius: f64, n: usize) -> FovPolygon {
        let ring = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                LocalPoint::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        FovPolygon::from_ring(CameraId(1), LocalPoint::default(), radius, ring)
    }

    fn square() -> FovPolygon {
        let ring = vec![
            LocalPoint::new(0.0, 0.0),
            LocalPoint::new(10.0, 0.0),
            LocalPoint::new(10.0, 10.0),
            LocalPoint::new(0.0, 10.0),
        ];
        FovPolygon::from_ring(CameraId(1), LocalPoint::default(), 15.0, ring)
    }

    #[test]
    fn chord_through_center() {
        // Vertex at angle 0 and π, so the chord hits the ring exactly at x = ±10.
        let poly = circle(10.0, 36);
        let r = intersect_segment_polygon(LocalPoint::new(-20.0, 0.0), LocalPoint::new(20.0, 0.0), &poly);
        assert_eq!(r.crossings.len(), 2);
        assert!((r.crossings[0].t - 0.25).abs() < 1e-12);
        assert!((r.crossings[1].t - 0.75).abs() < 1e-12);
        assert!(!r.starts_inside());
        assert!((r.inside_length() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn outside_segment_has_no_crossings() {
        let poly = circle(10.0, 36);
        let r = intersect_segment_polygon(LocalPoint::new(-20.0, 30.0), LocalPoint::new(20.0, 30.0), &poly);
        assert!(r.crossings.is_empty());
        assert!(!r.starts_inside());
    }

    #[test]
    fn ray_from_center_exits_once() {
        let poly = circle(10.0, 36);
        let r = intersect_segment_polygon(LocalPoint::new(0.0, 0.0), LocalPoint::new(20.0, 0.0), &poly);
        assert_eq!(r.crossings.len(), 1);
        assert!((r.crossings[0].point.x - 10.0).abs() < 1e-9);
        assert!(r.starts_inside());
    }

    #[test]
    fn wholly_inside() {
        let poly = circle(10.0, 36);
        let r = intersect_segment_polygon(LocalPoint::new(-2.0, 1.0), LocalPoint::new(3.0, -1.0), &poly);
        assert!(r.crossings.is_empty());
        assert!(r.starts_inside());
    }

    #[test]
    fn tangent_touch_at_vertex_is_not_a_crossing() {
        let poly = square();
        // Touches the corner (10, 10) only.
        let r = intersect_segment_polygon(LocalPoint::new(5.0, 15.0), LocalPoint::new(15.0, 5.0), &poly);
        assert!(r.crossings.is_empty());
        assert!(!r.starts_inside());
    }

    #[test]
    fn collinear_with_edge_counts_inside() {
        let poly = square();
        let r = intersect_segment_polygon(LocalPoint::new(-5.0, 0.0), LocalPoint::new(15.0, 0.0), &poly);
        assert_eq!(r.crossings.len(), 2);
        assert!((r.inside_length() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn containment_conventions() {
        let poly = circle(10.0, 36);
        assert!(point_in_polygon(LocalPoint::new(0.0, 0.0), &poly));
        assert!(!point_in_polygon(LocalPoint::new(20.0, 0.0), &poly));
        assert!(point_in_polygon(poly.vertices[5], &poly));
        let mid = poly.vertices[3].midpoint(poly.vertices[4]);
        assert!(point_in_polygon(mid, &poly));
    }

    #[test]
    fn ccw_area_is_positive() {
        assert!(square().signed_area() > 0.0);
        assert!((square().area() - 100.0).abs() < 1e-12);
    }
}
