use cctv_core::json::{route_feature, route_json};
use cctv_core::osm::maybe_gunzip;
use cctv_core::synth::{generate_grid, SynthConfig};
use cctv_core::{
    augment, emit_weights, parse_camera_csv, parse_osm, route as find_route, write_camera_csv, write_osm,
    AugmentedModel, PreprocessConfig, RouteConfig, RouteRequest, RouteStatus,
};
use cctv_service::ServiceConfig;
use serde_json::{json, Value};

use crate::error::{read, write, CliError, EXIT_NO_ROUTE};
use crate::{PreprocessArgs, RouteArgs, ServeArgs, SynthArgs};

type Outcome = Result<(Value, u8), CliError>;

pub fn preprocess(args: PreprocessArgs) -> Outcome {
    let osm = read(&args.osm)?;
    let model = parse_osm(&maybe_gunzip(&osm)?)?;
    let cameras = parse_camera_csv(&read(&args.cameras)?)?;
    let config = PreprocessConfig {
        arc_step: args.arc_step,
        ..PreprocessConfig::default()
    };
    let augmented = augment(&model, &cameras, &config)?;
    write(&args.out_osm, &write_osm(&augmented.model)?)?;
    write(&args.out_weights, &emit_weights(&augmented))?;
    let s = augmented.summary;
    Ok((
        json!({
            "cameras_added": s.cameras_added,
            "ways_split": s.ways_split,
            "boundary_nodes": s.boundary_nodes,
            "covered_edges": s.covered_edges,
        }),
        0,
    ))
}

pub fn route(args: RouteArgs) -> Outcome {
    let config = RouteConfig {
        beta: args.beta,
        cap: args.cap,
        ..RouteConfig::default()
    };
    config.validate()?;
    let (osm, weights) = (read(&args.dataset[0])?, read(&args.dataset[1])?);
    let augmented = AugmentedModel::from_bytes(&osm, &weights)?;
    let graph = cctv_core::build_graph(&augmented)?;
    let req = RouteRequest {
        from: args.from,
        to: args.to,
        mode: args.mode,
    };
    let result = find_route(&graph, &req, &config)?;
    let code = if result.status == RouteStatus::None { EXIT_NO_ROUTE } else { 0 };
    let doc = if args.geojson { route_feature(&result) } else { route_json(&result) };
    Ok((doc, code))
}

pub fn serve(args: ServeArgs) -> Outcome {
    let mut config = match (&args.config, &args.osm, &args.weights) {
        (Some(path), _, _) => ServiceConfig::from_file(path)?,
        (None, Some(osm), Some(weights)) => ServiceConfig::new(osm, weights),
        _ => return Err(CliError::Input("serve needs --config or both --osm and --weights".into())),
    };
    if let Some(listen) = args.listen {
        config.listen = listen;
    }
    if let Some(osm) = args.osm {
        config.osm = osm;
    }
    if let Some(weights) = args.weights {
        config.weights = weights;
    }
    config.beta = args.beta.unwrap_or(config.beta);
    config.cap = args.cap.unwrap_or(config.cap);
    config.validate()?;

    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Serve(e.into()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.listen)
            .await
            .map_err(|source| cctv_service::ServeError::Bind {
                addr: config.listen,
                source,
            })?;
        let addr = listener.local_addr().map_err(cctv_service::ServeError::Io)?;
        eprintln!("{}", json!({ "listening": addr.to_string() }));
        cctv_service::serve_on(listener, config, shutdown_signal()).await?;
        Ok((json!({ "status": "stopped", "listen": addr.to_string() }), 0))
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
    tracing::info!("shutdown requested");
}

pub fn synth(args: SynthArgs) -> Outcome {
    let mut config = SynthConfig::new(args.rows, args.cols, args.spacing, args.cameras, args.seed);
    config.min_radius = args.min_radius;
    config.max_radius = args.max_radius;
    config.min_angle = args.min_angle;
    config.angle_step = args.angle_step;
    if let Some(origin) = args.origin {
        config.origin = origin;
    }
    let map = generate_grid(&config)?;
    write(&args.out_osm, &write_osm(&map.model)?)?;
    write(&args.out_cameras, &write_camera_csv(&map.cameras))?;
    Ok((
        json!({
            "nodes": map.model.nodes.len(),
            "ways": map.model.ways.len(),
            "cameras": map.cameras.len(),
            "seed": args.seed,
        }),
        0,
    ))
}
