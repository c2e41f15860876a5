mod commands;
mod error;

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use cctv_core::{GeoPoint, Mode};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use tracing_subscriber::EnvFilter;

use crate::error::CliError;

/// CCTV-aware pedestrian routing.
#[derive(Debug, Parser)]
#[command(name = "cctv-router", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Add cameras to an OSM file and write the augmented OSM and weights.
    Preprocess(PreprocessArgs),
    /// Compute one route over a preprocessed dataset.
    Route(RouteArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Generate a synthetic grid map with random cameras.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// OSM XML, optionally gzipped.
    #[arg(long)]
    osm: PathBuf,
    /// Camera CSV: id,lat,lon,type,radius,angle,direction.
    #[arg(long)]
    cameras: PathBuf,
    #[arg(long)]
    out_osm: PathBuf,
    #[arg(long)]
    out_weights: PathBuf,
    /// Angular resolution of field-of-vision arcs, in degrees.
    #[arg(long, default_value_t = cctv_core::geo::DEFAULT_ARC_STEP_DEG)]
    arc_step: f64,
}

#[derive(Debug, Args)]
struct RouteArgs {
    /// Augmented OSM file and weights CSV.
    #[arg(long, num_args = 2, value_names = ["OSM", "WEIGHTS"])]
    dataset: Vec<PathBuf>,
    /// Start as `lat,lon`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    from: GeoPoint,
    /// Destination as `lat,lon`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    to: GeoPoint,
    #[arg(long, default_value = "default")]
    mode: Mode,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.6)]
    cap: f64,
    /// Print a GeoJSON FeatureCollection instead of the plain result.
    #[arg(long)]
    geojson: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// TOML config file.
    #[arg(long, env = "CCTV_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "CCTV_LISTEN")]
    listen: Option<SocketAddr>,
    #[arg(long, env = "CCTV_OSM")]
    osm: Option<PathBuf>,
    #[arg(long, env = "CCTV_WEIGHTS")]
    weights: Option<PathBuf>,
    #[arg(long, env = "CCTV_BETA")]
    beta: Option<f64>,
    #[arg(long, env = "CCTV_CAP")]
    cap: Option<f64>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Junction spacing in meters.
    #[arg(long)]
    spacing: f64,
    #[arg(long, default_value_t = 0)]
    cameras: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_osm: PathBuf,
    #[arg(long)]
    out_cameras: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    min_radius: f64,
    #[arg(long, default_value_t = 30.0)]
    max_radius: f64,
    #[arg(long, default_value_t = 60)]
    min_angle: u32,
    #[arg(long, default_value_t = 30)]
    angle_step: u32,
    /// Grid center as `lat,lon`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    origin: Option<GeoPoint>,
}

fn parse_point(s: &str) -> Result<GeoPoint, String> {
    let (lat, lon) = s.split_once(',').ok_or("expected lat,lon")?;
    let lat: f64 = lat.trim().parse().map_err(|_| format!("bad latitude {lat:?}"))?;
    let lon: f64 = lon.trim().parse().map_err(|_| format!("bad longitude {lon:?}"))?;
    GeoPoint::new(lat, lon).map_err(|e| e.to_string())
}

fn print(doc: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer(&mut out, doc);
    let _ = writeln!(out);
    let _ = out.flush();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            print(&CliError::Input(e.kind().to_string()).to_json());
            return ExitCode::from(error::EXIT_INPUT);
        }
    };
    let default_level = if matches!(cli.command, Command::Serve(_)) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .init();

    let outcome = match cli.command {
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Route(args) => commands::route(args),
        Command::Serve(args) => commands::serve(args),
        Command::Synth(args) => commands::synth(args),
    };
    match outcome {
        Ok((doc, code)) => {
            print(&doc);
            ExitCode::from(code)
        }
        Err(e) => {
            tracing::error!("{e}");
            print(&e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
