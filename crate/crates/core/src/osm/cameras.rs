use crate::camera::{Camera, CameraId, CameraType};
use crate::geo::GeoPoint;

use super::OsmError;

pub const CAMERA_CSV_HEADER: [&str; 7] = ["id", "lat", "lon", "type", "radius", "angle", "direction"];

/// Parses the camera table `id,lat,lon,type,radius,angle,direction`.
///
/// Columns are located by header name. Round cameras may leave `angle` and
/// `direction` blank (they default to 360 and 0). Row numbers in errors count
/// data rows from 1.
pub fn parse_camera_csv(bytes: &[u8]) -> Result<Vec<Camera>, OsmError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| OsmError::CsvSchema(e.to_string()))?
        .clone();
    let mut index = [0usize; 7];
    for (slot, name) in index.iter_mut().zip(CAMERA_CSV_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| OsmError::CsvSchema(format!("missing column {name:?}")))?;
    }

    let mut cameras = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| OsmError::CsvSchema(e.to_string()))?;
        let field = |col: usize| record.get(index[col]).unwrap_or("").trim();
        let invalid = |reason: String| OsmError::InvalidCamera { row, reason };
        let number = |col: usize| -> Result<Option<f64>, OsmError> {
            let raw = field(col);
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .map(Some)
                .map_err(|_| invalid(format!("{} {raw:?} is not a number", CAMERA_CSV_HEADER[col])))
        };
        let required = |col: usize| -> Result<f64, OsmError> {
            number(col)?.ok_or_else(|| invalid(format!("{} is required", CAMERA_CSV_HEADER[col])))
        };

        let id: u64 = field(0)
            .parse()
            .map_err(|_| invalid(format!("id {:?} is not an unsigned integer", field(0))))?;
        let lat = required(1)?;
        let lon = required(2)?;
        let cam_type: CameraType = field(3).parse().map_err(invalid)?;
        let radius = required(4)?;
        let (angle, direction) = match cam_type {
            CameraType::Round => (number(5)?.unwrap_or(360.0), number(6)?.unwrap_or(0.0)),
            CameraType::Directed => (required(5)?, required(6)?),
        };
        let location = GeoPoint::new(lat, lon).map_err(|e| invalid(e.to_string()))?;
        let camera = Camera::new(CameraId(id), location, cam_type, radius, angle, direction)
            .map_err(|e| invalid(e.to_string()))?;
        cameras.push(camera);
    }
    Ok(cameras)
}

/// Writes cameras in the layout [`parse_camera_csv`] reads.
pub fn write_camera_csv(cameras: &[Camera]) -> Vec<u8> {
    let mut out = String::from("id,lat,lon,type,radius,angle,direction\n");
    for c in cameras {
        match c.cam_type {
            CameraType::Round => out.push_str(&format!(
                "{},{:.7},{:.7},round,{},,\n",
                c.id, c.location.lat, c.location.lon, c.radius
            )),
            CameraType::Directed => out.push_str(&format!(
                "{},{:.7},{:.7},directed,{},{},{}\n",
                c.id, c.location.lat, c.location.lon, c.radius, c.angle, c.direction
            )),
        }
    }
    out.into_bytes()
}
