use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::GeoError;

/// Mean Earth radius used by the local projection, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let p = GeoPoint { lat, lon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        let ok = self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon);
        if ok {
            Ok(())
        } else {
            Err(GeoError::InvalidCoordinate {
                lat: self.lat,
                lon: self.lon,
            })
        }
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.7},{:.7}", self.lat, self.lon)
    }
}

/// Planar coordinate in meters relative to a projection origin (x east, y north).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalPoint {
    pub x: f64,
    pub y: f64,
}

impl LocalPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        LocalPoint { x, y }
    }

    pub fn dot(self, other: LocalPoint) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: LocalPoint) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: LocalPoint) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: LocalPoint, t: f64) -> LocalPoint {
        LocalPoint::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    pub fn midpoint(self, other: LocalPoint) -> LocalPoint {
        self.lerp(other, 0.5)
    }

    /// Unit vector pointing along `bearing` degrees, measured clockwise from north.
    pub fn from_bearing(bearing_deg: f64) -> LocalPoint {
        let b = bearing_deg.to_radians();
        LocalPoint::new(b.sin(), b.cos())
    }
}

impl Add for LocalPoint {
    type Output = LocalPoint;
    fn add(self, rhs: LocalPoint) -> LocalPoint {
        LocalPoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LocalPoint {
    type Output = LocalPoint;
    fn sub(self, rhs: LocalPoint) -> LocalPoint {
        LocalPoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for LocalPoint {
    type Output = LocalPoint;
    fn mul(self, rhs: f64) -> LocalPoint {
        LocalPoint::new(self.x * rhs, self.y * rhs)
    }
}

/// Equirectangular projection about a fixed origin.
///
/// `x = R·Δlon·cos(lat₀)`, `y = R·Δlat` with angles in radians. Accurate to
/// well under a centimeter at city scale and exactly invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    origin: GeoPoint,
    cos_lat0: f64,
}

impl Projection {
    pub fn new(origin: GeoPoint) -> Result<Self, GeoError> {
        origin.validate()?;
        Ok(Projection {
            origin,
            cos_lat0: origin.lat.to_radians().cos(),
        })
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn project(&self, p: GeoPoint) -> LocalPoint {
        let dlat = (p.lat - self.origin.lat).to_radians();
        let dlon = (p.lon - self.origin.lon).to_radians();
        LocalPoint::new(
            EARTH_RADIUS_M * dlon * self.cos_lat0,
            EARTH_RADIUS_M * dlat,
        )
    }

    /// Like [`Projection::project`] but rejects invalid coordinates.
    pub fn try_project(&self, p: GeoPoint) -> Result<LocalPoint, GeoError> {
        p.validate()?;
        Ok(self.project(p))
    }

    pub fn unproject(&self, q: LocalPoint) -> GeoPoint {
        GeoPoint {
            lat: self.origin.lat + (q.y / EARTH_RADIUS_M).to_degrees(),
            lon: self.origin.lon + (q.x / (EARTH_RADIUS_M * self.cos_lat0)).to_degrees(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> GeoPoint {
        GeoPoint::new(62.24, 25.74).unwrap()
    }

    #[test]
    fn origin_projects_to_zero() {
        let proj = Projection::new(origin()).unwrap();
        assert_eq!(proj.project(origin()), LocalPoint::new(0.0, 0.0));
    }

    #[test]
    fn one_millidegree_north() {
        let proj = Projection::new(origin()).unwrap();
        let q = proj.project(GeoPoint::new(62.241, 25.74).unwrap());
        // R * 0.001° in radians
        assert!((q.y - 111.19).abs() < 0.01, "y = {}", q.y);
        assert!(q.x.abs() < 1e-9);
    }

    #[test]
    fn round_trip() {
        let proj = Projection::new(origin()).unwrap();
        let p = GeoPoint::new(62.2426, 25.7473).unwrap();
        let back = proj.unproject(proj.project(p));
        assert!((back.lat - p.lat).abs() < 1e-9);
        assert!((back.lon - p.lon).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            GeoPoint::new(91.0, 0.0),
            Err(GeoError::InvalidCoordinate { .. })
        ));
        assert!(GeoPoint::new(0.0, f64::NAN).is_err());
        let proj = Projection::new(origin()).unwrap();
        assert!(proj
            .try_project(GeoPoint {
                lat: 0.0,
                lon: 200.0
            })
            .is_err());
    }
}
