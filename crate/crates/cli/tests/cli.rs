use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use cctv_core::osm::{parse_osm, write_osm};
use cctv_core::preprocess::{dataset_projection, TAG_SIDE};
use cctv_core::synth::SceneBuilder;
use cctv_core::write_camera_csv;
use serde_json::Value;
use tempfile::TempDir;

const ROAD: &[(&str, &str)] = &[("highway", "residential"), ("width", "6")];

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cctv-router"));
    cmd.env_remove("RUST_LOG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "stdout: {text}");
    serde_json::from_str(&text).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, name: &str, rows: &str, cols: &str, cameras: &str, seed: &str) -> (PathBuf, PathBuf, Output) {
    let (osm, cams) = (dir.join(format!("{name}.osm")), dir.join(format!("{name}.csv")));
    let out = run(&[
        "synth", "--rows", rows, "--cols", cols, "--spacing", "40", "--cameras", cameras, "--seed", seed,
        "--out-osm", p(&osm), "--out-cameras", p(&cams),
    ]);
    (osm, cams, out)
}

fn preprocess(dir: &Path, osm: &Path, cams: &Path, name: &str) -> (PathBuf, PathBuf, Output) {
    let (aug, weights) = (dir.join(format!("{name}.aug.osm")), dir.join(format!("{name}.weights.csv")));
    let out = run(&[
        "preprocess", "--osm", p(osm), "--cameras", p(cams), "--out-osm", p(&aug), "--out-weights", p(&weights),
    ]);
    (aug, weights, out)
}

#[test]
fn synth_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a_osm, a_cams, out) = synth(dir.path(), "a", "4", "5", "12", "1");
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert_eq!(summary["cameras"], 12);
    assert_eq!(summary["ways"], 2 * 4 * 5 - 4 - 5);
    let (b_osm, b_cams, _) = synth(dir.path(), "b", "4", "5", "12", "1");
    assert_eq!(std::fs::read(&a_osm).unwrap(), std::fs::read(&b_osm).unwrap());
    assert_eq!(std::fs::read(&a_cams).unwrap(), std::fs::read(&b_cams).unwrap());
    let (_, c_cams, _) = synth(dir.path(), "c", "4", "5", "12", "2");
    assert_ne!(std::fs::read(&a_cams).unwrap(), std::fs::read(&c_cams).unwrap());
}

#[test]
fn synth_edge_cases() {
    let dir = TempDir::new().unwrap();
    let (osm, cams, out) = synth(dir.path(), "small", "2", "2", "0", "7");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(parse_osm(&std::fs::read(osm).unwrap()).unwrap().ways.len(), 4);
    assert_eq!(std::fs::read_to_string(cams).unwrap(), "id,lat,lon,type,radius,angle,direction\n");

    let (_, _, out) = synth(dir.path(), "bad", "1", "3", "0", "7");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "synth");
}

#[test]
fn preprocess_summary_and_rerun() {
    let dir = TempDir::new().unwrap();
    let (osm, cams, _) = synth(dir.path(), "g", "5", "5", "15", "3");
    let (aug, weights, out) = preprocess(dir.path(), &osm, &cams, "one");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = stdout_json(&out);

    // Count straight from the written files.
    let model = parse_osm(&std::fs::read(&aug).unwrap()).unwrap();
    let cameras = model.nodes.values().filter(|n| n.tags.has("man_made", "surveillance")).count();
    let middles = model.ways.values().filter(|w| w.tags.get(TAG_SIDE) == Some("middle")).count();
    let boundary = model
        .nodes
        .values()
        .filter(|n| n.id < 0 && n.tags.has("access", "surveillance"))
        .count();
    // One row per direction.
    let rows = std::fs::read_to_string(&weights).unwrap().lines().count() - 1;
    assert_eq!(summary["cameras_added"], 15);
    assert_eq!(summary["cameras_added"], cameras);
    assert_eq!(summary["ways_split"], middles);
    assert_eq!(summary["boundary_nodes"], boundary);
    assert_eq!(summary["covered_edges"], rows / 2);

    let (aug2, weights2, out2) = preprocess(dir.path(), &osm, &cams, "two");
    assert_eq!(out.stdout, out2.stdout);
    assert_eq!(std::fs::read(aug).unwrap(), std::fs::read(aug2).unwrap());
    assert_eq!(std::fs::read(weights).unwrap(), std::fs::read(weights2).unwrap());
}

#[test]
fn preprocess_errors() {
    let dir = TempDir::new().unwrap();
    let (osm, cams, _) = synth(dir.path(), "g", "3", "3", "2", "3");
    let missing = dir.path().join("missing.osm");
    let (_, _, out) = preprocess(dir.path(), &missing, &cams, "x");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "read");

    let broken = dir.path().join("broken.osm");
    std::fs::write(&broken, "<osm><node id=\"1\" lat=\"x\"").unwrap();
    let (_, _, out) = preprocess(dir.path(), &broken, &cams, "x");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "osm");

    let bad_cams = dir.path().join("bad.csv");
    std::fs::write(&bad_cams, "id,lat,lon\n1,2,3\n").unwrap();
    let (_, _, out) = preprocess(dir.path(), &osm, &bad_cams, "x");
    assert_eq!(out.status.code(), Some(2));

    let (aug, _, _) = preprocess(dir.path(), &osm, &cams, "once");
    let (_, _, out) = preprocess(dir.path(), &aug, &cams, "twice");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "preprocess");
}

/// 5×5 grid (spacing 50) with the center enclosed by four cameras.
fn enclosed_dataset(dir: &Path) -> (PathBuf, PathBuf, cctv_core::synth::Scene) {
    let mut b = SceneBuilder::default();
    let ids: Vec<Vec<i64>> = (0..5)
        .map(|r| (0..5).map(|c| b.node(c as f64 * 50.0, r as f64 * 50.0)).collect())
        .collect();
    for r in 0..5 {
        for c in 0..5 {
            if c + 1 < 5 {
                b.way(&[ids[r][c], ids[r][c + 1]], ROAD);
            }
            if r + 1 < 5 {
                b.way(&[ids[r][c], ids[r + 1][c]], ROAD);
            }
        }
    }
    for (id, (x, y)) in [(1, (75.0, 100.0)), (2, (125.0, 100.0)), (3, (100.0, 75.0)), (4, (100.0, 125.0))] {
        b.round_camera(id, x, y, 10.0);
    }
    let scene = b.build().unwrap();
    let (osm, cams) = (dir.join("enc.osm"), dir.join("enc.csv"));
    std::fs::write(&osm, write_osm(&scene.model).unwrap()).unwrap();
    std::fs::write(&cams, write_camera_csv(&scene.cameras)).unwrap();
    let (aug, weights, out) = preprocess(dir, &osm, &cams, "enc");
    assert_eq!(out.status.code(), Some(0));
    (aug, weights, scene)
}

fn route_cmd(aug: &Path, weights: &Path, from: &str, to: &str, mode: &str, extra: &[&str]) -> Output {
    let mut args = vec!["route", "--dataset", p(aug), p(weights), "--from", from, "--to", to, "--mode", mode];
    args.extend_from_slice(extra);
    run(&args)
}

/// Bellman-Ford over the travellable ways of the written file.
fn brute_force_distance(aug: &Path, from: i64, to: i64) -> f64 {
    let model = parse_osm(&std::fs::read(aug).unwrap()).unwrap();
    let proj = dataset_projection(&model);
    let mut edges = Vec::new();
    for way in model.ways.values().filter(|w| w.tags.get("highway").is_some()) {
        for s in way.node_refs.windows(2) {
            let a = proj.project(model.nodes[&s[0]].location);
            let b = proj.project(model.nodes[&s[1]].location);
            edges.push((s[0], s[1], a.distance(b)));
        }
    }
    let mut dist: std::collections::HashMap<i64, f64> = [(from, 0.0)].into();
    loop {
        let mut changed = false;
        for &(a, b, l) in &edges {
            for (u, v) in [(a, b), (b, a)] {
                if let Some(&du) = dist.get(&u) {
                    if dist.get(&v).is_none_or(|&dv| du + l < dv - 1e-12) {
                        dist.insert(v, du + l);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist[&to]
}

#[test]
fn route_modes_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (aug, weights, scene) = enclosed_dataset(dir.path());
    let ll = |x: f64, y: f64| {
        let g = scene.geo(x, y);
        format!("{},{}", g.lat, g.lon)
    };
    let (corner, center) = (ll(0.0, 0.0), ll(100.0, 100.0));

    let out = route_cmd(&aug, &weights, &corner, &center, "privacy", &[]);
    assert_eq!(out.status.code(), Some(3));
    let body = stdout_json(&out);
    assert_eq!(body["status"], "none");
    assert_eq!(body["geometry"]["coordinates"].as_array().unwrap().len(), 0);

    let out = route_cmd(&aug, &weights, &corner, &center, "default", &[]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout_json(&out);
    assert_eq!(body["status"], "complete");
    let oracle = brute_force_distance(&aug, 1, 13);
    assert!((body["distance_m"].as_f64().unwrap() - oracle).abs() < 1e-6, "{body} vs {oracle}");

    let again = route_cmd(&aug, &weights, &corner, &center, "default", &[]);
    assert_eq!(out.stdout, again.stdout);

    let out = route_cmd(&aug, &weights, &corner, &ll(200.0, 200.0), "privacy", &["--geojson"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout_json(&out);
    assert_eq!(body["type"], "FeatureCollection");
    assert_eq!(body["features"][0]["properties"]["surveilled_distance_m"], 0.0);

    let out = route_cmd(&aug, &weights, &corner, &center, "safety", &[]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn route_bad_input_is_exit_2() {
    let dir = TempDir::new().unwrap();
    let (aug, weights, _) = enclosed_dataset(dir.path());
    for (from, mode, extra) in [
        ("62.0,25.0", "teleport", &[][..]),
        ("62.0", "default", &[][..]),
        ("95.0,25.0", "default", &[][..]),
        ("62.0,25.0", "default", &["--cap", "0.5"][..]),
    ] {
        let out = route_cmd(&aug, &weights, from, "62.0,25.0", mode, extra);
        assert_eq!(out.status.code(), Some(2), "{from} {mode} {extra:?}");
        assert!(stdout_json(&out)["error"].is_string());
    }
    let out = route_cmd(&aug, &dir.path().join("nope.csv"), "62.0,25.0", "62.0,25.0", "default", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = route_cmd(&aug, &weights, "10.0,10.0", "62.0,25.0", "privacy", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "no_snap_candidate");
}

fn http_get(addr: SocketAddr, path: &str) -> Option<(u16, String)> {
    let mut stream = TcpStream::connect(addr).ok()?;
    write!(stream, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut text = String::new();
    stream.read_to_string(&mut text).ok()?;
    let status = text.get(9..12)?.parse().ok()?;
    Some((status, text.split_once("\r\n\r\n")?.1.to_string()))
}

#[test]
fn serve_health_and_sigterm() {
    let dir = TempDir::new().unwrap();
    let (aug, weights, _) = enclosed_dataset(dir.path());
    let mut child = bin()
        .args(["serve", "--listen", "127.0.0.1:0", "--osm", p(&aug), "--weights", p(&weights)])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut addr = None;
    let mut line = String::new();
    while addr.is_none() && stderr.read_line(&mut line).unwrap() > 0 {
        if let Ok(v) = serde_json::from_str::<Value>(line.trim()) {
            addr = v["listening"].as_str().map(|s| s.parse::<SocketAddr>().unwrap());
        }
        line.clear();
    }
    let addr = addr.expect("listening line");
    std::thread::spawn(move || std::io::copy(&mut stderr, &mut std::io::sink()));

    let deadline = Instant::now() + Duration::from_secs(20);
    let body = loop {
        match http_get(addr, "/health") {
            Some((200, body)) => break body,
            _ if Instant::now() > deadline => panic!("health never became ready"),
            _ => std::thread::sleep(Duration::from_millis(20)),
        }
    };
    let health: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(health["status"], "ok");
    assert_eq!(health["camera_count"], 4);

    let killed = Command::new("kill").args(["-TERM", &child.id().to_string()]).status().unwrap();
    assert!(killed.success());
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "stopped");
}

#[test]
fn serve_config_errors() {
    let dir = TempDir::new().unwrap();
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().to_string();
    let out = run(&["serve", "--listen", &port, "--osm", "a.osm", "--weights", "w.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "serve");

    let cfg = dir.path().join("serve.toml");
    std::fs::write(&cfg, "osm = \"a.osm\"\nweights = \"w.csv\"\ncap = 0.2\n").unwrap();
    let out = run(&["serve", "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "config");

    std::fs::write(&cfg, "osm = [").unwrap();
    assert_eq!(run(&["serve", "--config", p(&cfg)]).status.code(), Some(2));
    assert_eq!(run(&["serve"]).status.code(), Some(2));
    assert_eq!(run(&["serve", "--config", p(&dir.path().join("none.toml"))]).status.code(), Some(2));
}

#[test]
fn usage_errors_are_json() {
    let out = run(&["route"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "input");
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
