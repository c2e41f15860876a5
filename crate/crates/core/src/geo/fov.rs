use super::point::{LocalPoint, Projection};
use super::polygon::FovPolygon;
use super::GeoError;
use crate::camera::Camera;

pub const DEFAULT_ARC_STEP_DEG: f64 = 10.0;
pub const MIN_RING_VERTICES: usize = 8;

/// Builds the surveilled area of `camera` in the frame of `projection`.
///
/// Round cameras become a regular polygon inscribed in the viewing circle.
/// Directed cameras become the apex followed by an arc centered on the
/// camera direction, with no arc segment wider than `arc_step` degrees.
pub fn build_fov_polygon(
    camera: &Camera,
    projection: &Projection,
    arc_step: f64,
) -> Result<FovPolygon, GeoError> {
    let apex = projection.try_project(camera.location)?;
    let ring = fov_ring(apex, camera.radius, camera.angle, camera.direction, arc_step)
        .map_err(|reason| GeoError::InvalidCamera {
            id: camera.id.0,
            reason,
        })?;
    Ok(FovPolygon::from_ring(camera.id, apex, camera.radius, ring))
}

pub fn fov_ring(
    apex: LocalPoint,
    radius: f64,
    angle: f64,
    direction: f64,
    arc_step: f64,
) -> Result<Vec<LocalPoint>, String> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(format!("radius must be positive, got {radius}"));
    }
    if !(angle.is_finite() && angle > 0.0) {
        return Err(format!("angle must be positive, got {angle}"));
    }
    if !(arc_step > 0.0 && arc_step <= 45.0) {
        return Err(format!("arc step must be in (0, 45], got {arc_step}"));
    }
    let at = |bearing: f64| apex + LocalPoint::from_bearing(bearing) * radius;

    if angle >= 360.0 {
        let n = segments_for(360.0, arc_step).max(MIN_RING_VERTICES);
        let step = 360.0 / n as f64;
        // Decreasing bearing walks counter-clockwise.
        return Ok((0..n).map(|k| at(-(k as f64) * step)).collect());
    }

    let n = segments_for(angle, arc_step).max(MIN_RING_VERTICES - 2);
    let step = angle / n as f64;
    let start = direction + angle / 2.0;
    let mut ring = Vec::with_capacity(n + 2);
    ring.push(apex);
    ring.extend((0..=n).map(|k| at(start - k as f64 * step)));
    Ok(ring)
}

fn segments_for(angle: f64, arc_step: f64) -> usize {
    // Guard against 360 / 10 landing at 36.000000000000004.
    ((angle / arc_step) - 1e-9).ceil().max(1.0) as usize
}
