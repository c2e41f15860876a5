//! JSON views of routes and cameras (GeoJSON coordinate order: lon, lat).

use serde_json::{json, Value};

use crate::geo::GeoPoint;
use crate::preprocess::AugmentedModel;
use crate::router::RouteResult;

fn lon_lat(p: GeoPoint) -> Value {
    json!([p.lon, p.lat])
}

fn lat_lon(p: GeoPoint) -> Value {
    json!({ "lat": p.lat, "lon": p.lon })
}

/// Route response body.
pub fn route_json(r: &RouteResult) -> Value {
    json!({
        "mode": r.mode.as_str(),
        "status": r.status.as_str(),
        "geometry": {
            "type": "LineString",
            "coordinates": r.geometry.iter().copied().map(lon_lat).collect::<Vec<_>>(),
        },
        "distance_m": r.distance,
        "surveilled_distance_m": r.surveilled_distance,
        "cameras_passed": r.cameras_passed,
        "snapped_from": lat_lon(r.snapped_from),
        "snapped_to": lat_lon(r.snapped_to),
    })
}

/// The route as a GeoJSON feature with the summary in its properties.
pub fn route_feature(r: &RouteResult) -> Value {
    let mut body = route_json(r);
    let geometry = body["geometry"].take();
    let props = body.as_object_mut().expect("object");
    props.remove("geometry");
    props.insert("nodes".into(), json!(r.nodes));
    json!({
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "geometry": geometry,
            "properties": Value::Object(props.clone()),
        }],
    })
}

/// One Point and one closed Polygon feature per camera, by ascending id.
pub fn cameras_geojson(augmented: &AugmentedModel) -> Value {
    let mut features = Vec::with_capacity(augmented.cameras.len() * 2);
    for cam in &augmented.cameras {
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "Point", "coordinates": lon_lat(cam.location) },
            "properties": {
                "id": cam.id,
                "kind": "camera",
                "type": cam.cam_type.as_str(),
                "radius": cam.radius,
                "angle": cam.angle,
                "direction": cam.direction,
            },
        }));
        if let Some(fov) = augmented.fov_index.get(&cam.id) {
            let mut ring: Vec<Value> = fov
                .vertices
                .iter()
                .map(|&v| lon_lat(augmented.projection.unproject(v)))
                .collect();
            if let Some(first) = ring.first().cloned() {
                ring.push(first);
            }
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "Polygon", "coordinates": [ring] },
                "properties": { "id": cam.id, "kind": "fov" },
            }));
        }
    }
    json!({ "type": "FeatureCollection", "features": features })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{augment, PreprocessConfig};
    use crate::router::{build_graph, route, Mode, RouteConfig, RouteRequest};
    use crate::synth::SceneBuilder;

    fn dataset() -> (AugmentedModel, crate::synth::Scene) {
        let mut b = SceneBuilder::default();
        b.path(&[(0.0, 0.0), (200.0, 0.0)], &[("highway", "residential")]);
        b.round_camera(2, 60.0, 0.0, 10.0);
        b.directed_camera(1, 150.0, -10.0, 15.0, 90.0, 0.0);
        let scene = b.build().unwrap();
        let aug = augment(&scene.model, &scene.cameras, &PreprocessConfig::default()).unwrap();
        (aug, scene)
    }

    #[test]
    fn camera_collection() {
        let (aug, _) = dataset();
        let fc = cameras_geojson(&aug);
        let features = fc["features"].as_array().unwrap();
        assert_eq!(features.len(), 4);
        assert_eq!(features[0]["properties"]["id"], 1);
        assert_eq!(features[0]["properties"]["type"], "directed");
        for poly in [&features[1], &features[3]] {
            let ring = poly["geometry"]["coordinates"][0].as_array().unwrap();
            assert!(ring.len() >= 4);
            assert_eq!(ring.first(), ring.last());
        }
    }

    #[test]
    fn route_body_fields() {
        let (aug, scene) = dataset();
        let g = build_graph(&aug).unwrap();
        let r = route(
            &g,
            &RouteRequest {
                from: scene.geo(0.0, 0.0),
                to: scene.geo(200.0, 0.0),
                mode: Mode::Default,
            },
            &RouteConfig::default(),
        )
        .unwrap();
        let body = route_json(&r);
        assert_eq!(body["status"], "complete");
        assert_eq!(body["geometry"]["type"], "LineString");
        let first = &body["geometry"]["coordinates"][0];
        assert_eq!(first[0].as_f64().unwrap(), r.geometry[0].lon);
        assert!((body["distance_m"].as_f64().unwrap() - 200.0).abs() < 1e-6);
        assert!(body["surveilled_distance_m"].as_f64().unwrap() > 0.0);
        let feature = route_feature(&r);
        assert_eq!(feature["features"][0]["properties"]["status"], "complete");
        assert!(feature["features"][0]["properties"]["nodes"].is_array());
    }
}
