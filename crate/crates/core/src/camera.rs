use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geo::{GeoError, GeoPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CameraId(pub u64);

impl fmt::Display for CameraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CameraType {
    Round,
    Directed,
}

impl CameraType {
    pub fn as_str(&self) -> &'static str {
        match self {
            CameraType::Round => "round",
            CameraType::Directed => "directed",
        }
    }
}

impl FromStr for CameraType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "round" => Ok(CameraType::Round),
            "directed" => Ok(CameraType::Directed),
            other => Err(format!("unknown camera type {other:?}")),
        }
    }
}

/// A surveillance camera and its horizontal field of vision.
///
/// `direction` is measured in degrees clockwise from north and marks the
/// center of the field of vision; `angle` is its full width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub id: CameraId,
    pub location: GeoPoint,
    pub cam_type: CameraType,
    pub radius: f64,
    pub angle: f64,
    pub direction: f64,
}

impl Camera {
    /// Validates and normalizes a camera. A directed camera whose angle
    /// reaches 360° is a round camera.
    pub fn new(
        id: CameraId,
        location: GeoPoint,
        cam_type: CameraType,
        radius: f64,
        angle: f64,
        direction: f64,
    ) -> Result<Camera, GeoError> {
        let invalid = |reason: String| GeoError::InvalidCamera { id: id.0, reason };
        location.validate()?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        if !(angle.is_finite() && angle > 0.0 && angle <= 360.0) {
            return Err(invalid(format!("angle must be in (0, 360], got {angle}")));
        }
        if !(direction.is_finite() && (0.0..360.0).contains(&direction)) {
            return Err(invalid(format!(
                "direction must be in [0, 360), got {direction}"
            )));
        }
        let cam_type = match cam_type {
            CameraType::Round if angle < 360.0 => {
                return Err(invalid(format!(
                    "round camera must have a 360 degree angle, got {angle}"
                )))
            }
            _ if angle >= 360.0 => CameraType::Round,
            t => t,
        };
        Ok(Camera {
            id,
            location,
            cam_type,
            radius,
            angle,
            direction,
        })
    }

    pub fn round(id: u64, location: GeoPoint, radius: f64) -> Result<Camera, GeoError> {
        Camera::new(CameraId(id), location, CameraType::Round, radius, 360.0, 0.0)
    }

    pub fn directed(
        id: u64,
        location: GeoPoint,
        radius: f64,
        angle: f64,
        direction: f64,
    ) -> Result<Camera, GeoError> {
        Camera::new(
            CameraId(id),
            location,
            CameraType::Directed,
            radius,
            angle,
            direction,
        )
    }

    pub fn is_round(&self) -> bool {
        self.angle >= 360.0
    }
}
