//! `roadtwin` command-line pipeline.
//!
//! Every subcommand reads a JSON run config (`--config`, with `--set`
//! key=value overrides), writes its outputs plus a run manifest, prints a
//! single summary line to stdout and logs details to a file. Exit codes:
//! 0 success, 1 domain error, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use roadtwin_cli::config::{
    self, load_config, DefectConfig, MapSource, PlanConfig, RasterizeConfig, SceneGenConfig,
    SurfaceConfig, SweepConfig,
};
use roadtwin_cli::logger::Logger;
use roadtwin_cli::manifest::RunManifest;
use roadtwin_cli::{library, pgm, ply, scene, svg, CliError};
use roadtwin_core::math::p2;
use roadtwin_core::model::{self, LibraryEntry};
use roadtwin_core::planning::{
    self, evaluate_path, path_is_wheel_feasible, plan_astar, plan_hybrid_astar, plan_lattice,
    plan_rrtstar, rasterize, GridMap, HybridConfig, LatticeConfig, MapBounds, PlannedPath,
    RoadFrame, RrtStarConfig,
};
use roadtwin_core::twin::validate_scene;
use roadtwin_core::vibration::{extract_track_profiles, sweep_profile};

#[derive(Parser)]
#[command(
    name = "roadtwin",
    version,
    about = "Road-defect scene reconstruction, integration, planning and ride evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key: --set key.path=value (JSON literal or string).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Log file (defaults next to the outputs).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a coarse road surface model into a library.
    ReconstructSurface(RunArgs),
    /// Reconstruct fine defect models from an elevation map into a library.
    ReconstructDefect(RunArgs),
    /// Library maintenance.
    Library {
        #[command(subcommand)]
        action: LibraryAction,
    },
    /// Generate a defected scene from segments and a model library.
    GenerateScene(RunArgs),
    /// Validate a generated scene directory.
    Validate {
        /// Scene output directory (scene.obj + manifest.json).
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Rasterize a scene into an occupancy grid map.
    Rasterize(RunArgs),
    /// Plan a wheel-feasible path over a grid map.
    Plan(RunArgs),
    /// Sweep traversal speeds and report vibration degrees.
    VibrationSweep(RunArgs),
}

#[derive(Subcommand)]
enum LibraryAction {
    /// List library entries.
    List {
        #[arg(long)]
        path: PathBuf,
    },
    /// Import a mesh + metadata pair as a new entry.
    Add {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        meta: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match cli.command {
        Command::ReconstructSurface(args) => reconstruct_surface(&args),
        Command::ReconstructDefect(args) => reconstruct_defect(&args),
        Command::Library { action } => run_library(action),
        Command::GenerateScene(args) => generate_scene(&args),
        Command::Validate { scene, log } => validate(&scene, log),
        Command::Rasterize(args) => run_rasterize(&args),
        Command::Plan(args) => plan(&args),
        Command::VibrationSweep(args) => vibration_sweep(&args),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary} ({:.2}s)", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn logger_for(args_log: Option<&PathBuf>, out: &Path) -> Logger {
    match args_log {
        Some(path) => Logger::to_file(path),
        None => Logger::to_file(&out.join("roadtwin.log")),
    }
}

type CmdResult = Result<String, CliError>;

fn reconstruct_surface(args: &RunArgs) -> CmdResult {
    let cfg: SurfaceConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut log = logger_for(args.log.as_ref(), &cfg.library);
    log.log(format!("reconstruct-surface config={:?}", args.config));
    let cloud = ply::read_cloud(&cfg.cloud)?;
    log.log(format!("loaded {} points from {:?}", cloud.len(), cfg.cloud));
    let filtered = match &cfg.mask {
        Some(mask_ref) => {
            let (w, h, data) = pgm::read_mask(&mask_ref.pgm)?;
            let mask = model::SemanticMask::new(w, h, data, mask_ref.projection)?;
            let kept = model::filter_points_by_mask(&cloud, &mask);
            log.log(format!("mask kept {} of {} points", kept.len(), cloud.len()));
            kept
        }
        None => cloud,
    };
    let (leveled, transform) = model::level_to_ground(&filtered, seed)?;
    log.log(format!(
        "leveling deviation from identity: {:.3e}",
        transform.deviation_from_identity()
    ));
    let surface = model::reconstruct_surface(&leveled, cfg.leaf)?;
    let mut lib = if cfg.library.join(library::MANIFEST_FILE).exists() {
        library::load_library(&cfg.library)?
    } else {
        model::ModelLibrary::new()
    };
    let surface = model::SurfaceModel::from_mesh(surface.mesh().clone(), transform)?;
    let (vertices, faces) = (surface.mesh().vertices.len(), surface.mesh().faces.len());
    lib.add(&cfg.name, LibraryEntry::Surface(surface))?;
    library::save_library(&cfg.library, &lib)?;
    let mut run = RunManifest::new("reconstruct-surface", serde_json::to_value(&cfg).unwrap());
    run.seed = Some(seed);
    run.record_input(&cfg.cloud)?;
    run.record_output(&cfg.library.join(format!("{}.ply", cfg.name)));
    run.write(&cfg.library.join(format!("{}.run.json", cfg.name)))?;
    Ok(format!(
        "reconstruct-surface: {:?} -> {} vertices / {} faces in {:?}",
        cfg.name, vertices, faces, cfg.library
    ))
}

fn reconstruct_defect(args: &RunArgs) -> CmdResult {
    let cfg: DefectConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let mut log = logger_for(args.log.as_ref(), &cfg.library);
    let emap = pgm::read_elevation_map(&cfg.elevation_map)?;
    let instances = model::extract_defect_instances(&emap, cfg.depth_threshold, cfg.min_area);
    log.log(format!(
        "{} defect instances above {} m^2",
        instances.len(),
        cfg.min_area
    ));
    let mut lib = if cfg.library.join(library::MANIFEST_FILE).exists() {
        library::load_library(&cfg.library)?
    } else {
        model::ModelLibrary::new()
    };
    let mut added = 0;
    for (i, inst) in instances.iter().enumerate() {
        let samples = model::sample_defect_points(&emap, inst, cfg.stride)?;
        match model::build_defect_model(&samples) {
            Ok(defect) => {
                let name = format!("{}{:03}", cfg.name_prefix, i);
                log.log(format!(
                    "{name}: {} cells, depth {:.4} m, area {:.4} m^2",
                    inst.cell_count(),
                    defect.metadata.max_depth,
                    defect.metadata.area
                ));
                lib.add(&name, LibraryEntry::Defect(defect))?;
                added += 1;
            }
            Err(e) => log.log(format!("instance {i} rejected: {e}")),
        }
    }
    library::save_library(&cfg.library, &lib)?;
    let mut run = RunManifest::new("reconstruct-defect", serde_json::to_value(&cfg).unwrap());
    run.record_input(&cfg.elevation_map)?;
    run.write(&cfg.library.join(format!("{}.run.json", cfg.name_prefix)))?;
    Ok(format!(
        "reconstruct-defect: {added} of {} instances added to {:?}",
        instances.len(),
        cfg.library
    ))
}

fn run_library(action: LibraryAction) -> CmdResult {
    match action {
        LibraryAction::List { path } => {
            let lib = library::load_library(&path)?;
            let manifest = lib.manifest();
            let defects = manifest
                .iter()
                .filter(|e| e.kind == model::EntryKind::Defect)
                .count();
            Ok(format!(
                "library {path:?}: {} entries ({} defects, {} surfaces)",
                manifest.len(),
                defects,
                manifest.len() - defects
            ))
        }
        LibraryAction::Add {
            path,
            name,
            mesh,
            meta,
        } => {
            let written = library::import_entry(&path, &name, &mesh, &meta)?;
            Ok(format!("library add: {name:?} -> {written:?}"))
        }
    }
}

fn generate_scene(args: &RunArgs) -> CmdResult {
    let cfg: SceneGenConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut log = logger_for(args.log.as_ref(), &cfg.out);
    let specs = config::load_segments(&cfg.segments)?;
    let segments = scene::build_segments(&specs, cfg.mesh_max_edge)?;
    let lib = library::load_library(&cfg.library)?;
    log.log(format!(
        "{} segments, {} library entries, count={}, seed={seed}",
        segments.len(),
        lib.len(),
        cfg.count
    ));
    let assets = scene::generate(&segments, &lib, cfg.surface.as_deref(), &cfg, seed)?;
    let validation = assets
        .manifest
        .validation
        .as_ref()
        .map(|r| if r.passes() { "PASS" } else { "FAIL" })
        .unwrap_or("SKIPPED");
    if let Some(report) = &assets.manifest.validation {
        for failure in report.failures() {
            log.log(format!(
                "validation failure: {} {}: {}",
                failure.asset, failure.check, failure.detail
            ));
        }
    }
    let mut run = RunManifest::new("generate-scene", serde_json::to_value(&cfg).unwrap());
    run.seed = Some(seed);
    run.record_input(&cfg.segments)?;
    run.record_input(&cfg.library.join(library::MANIFEST_FILE))?;
    scene::write_scene(&cfg.out, &assets, &mut run)?;
    let summary = format!(
        "generate-scene: {} segments, {} defects, validation {validation}, wrote {:?}",
        assets.roads.len(),
        assets.defects.len(),
        cfg.out
    );
    if validation == "FAIL" {
        return Err(CliError::Config(format!(
            "scene validation failed; see {:?}",
            cfg.out.join("manifest.json")
        )));
    }
    Ok(summary)
}

fn validate(scene_dir: &Path, log: Option<PathBuf>) -> CmdResult {
    let mut logger = logger_for(log.as_ref(), scene_dir);
    let assets = scene::read_scene(scene_dir)?;
    let report = validate_scene(&assets);
    for check in &report.checks {
        if !check.pass {
            logger.log(format!(
                "FAIL {} {}: {}",
                check.asset, check.check, check.detail
            ));
        }
    }
    let failures = report.failures().count();
    if failures > 0 {
        return Err(CliError::Config(format!(
            "validate: {failures} of {} checks failed in {scene_dir:?}",
            report.checks.len()
        )));
    }
    Ok(format!(
        "validate: {} checks passed for {} road / {} defect assets in {scene_dir:?}",
        report.checks.len(),
        assets.roads.len(),
        assets.defects.len()
    ))
}

fn run_rasterize(args: &RunArgs) -> CmdResult {
    let cfg: RasterizeConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let mut log = logger_for(args.log.as_ref(), &cfg.out);
    let assets = scene::read_scene(&cfg.scene)?;
    let grid = planning::rasterize_scene(&assets.manifest, cfg.resolution, cfg.margin)?;
    log.log(format!(
        "rasterized {}x{} cells at {} m",
        grid.width, grid.height, grid.resolution
    ));
    std::fs::create_dir_all(&cfg.out).map_err(|e| roadtwin_cli::CliError::Io {
        path: cfg.out.clone(),
        source: e,
    })?;
    let map_path = cfg.out.join("map.pgm");
    pgm::write_gridmap(&map_path, &grid)?;
    let mut run = RunManifest::new("rasterize", serde_json::to_value(&cfg).unwrap());
    run.record_output(&map_path);
    run.write(&cfg.out.join("rasterize.run.json"))?;
    Ok(format!(
        "rasterize: {}x{} map at {} m/cell, wrote {map_path:?}",
        grid.width, grid.height, grid.resolution
    ))
}

fn load_map(source: &MapSource) -> Result<GridMap, CliError> {
    match source {
        MapSource::Gridmap { path } => pgm::read_gridmap(path),
        MapSource::Polygons {
            roads,
            defects,
            resolution,
            margin,
        } => {
            let roads: Vec<_> = roads.iter().map(|p| config::polygon(p)).collect();
            let defects: Vec<_> = defects.iter().map(|p| config::polygon(p)).collect();
            let bounds =
                MapBounds::of_polygons(&roads, *margin).ok_or(planning::PlanError::BadMapShape)?;
            Ok(rasterize(&roads, &defects, bounds, *resolution)?)
        }
    }
}

fn plan(args: &RunArgs) -> CmdResult {
    let cfg: PlanConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut log = logger_for(args.log.as_ref(), &cfg.out);
    let grid = load_map(&cfg.map)?;
    let vehicle = cfg.vehicle.unwrap_or_default().model();
    let (start, goal) = (cfg.start_pose(), cfg.goal_pose());
    log.log(format!(
        "planner={} start=({}, {}, {}) goal=({}, {}, {}) seed={seed}",
        cfg.planner, start.x, start.y, start.yaw, goal.x, goal.y, goal.yaw
    ));
    let path: PlannedPath = match cfg.planner.as_str() {
        "astar" => plan_astar(&grid, start, goal, &vehicle)?,
        "rrtstar" => plan_rrtstar(
            &grid,
            start,
            goal,
            &vehicle,
            seed,
            cfg.max_iters,
            &RrtStarConfig::default(),
        )?,
        "lattice" => {
            let frame_cfg = cfg.road_frame.as_ref().expect("validated");
            let frame = RoadFrame {
                origin: p2(frame_cfg.origin[0], frame_cfg.origin[1]),
                heading: frame_cfg.heading,
                length: frame_cfg.length,
            };
            let lattice_cfg = LatticeConfig {
                max_lateral: frame_cfg.max_lateral,
                ..Default::default()
            };
            plan_lattice(&grid, start, goal, &vehicle, &frame, &lattice_cfg)?
        }
        "hybrid_astar" => plan_hybrid_astar(&grid, start, goal, &vehicle, &HybridConfig::default())?,
        other => return Err(CliError::Config(format!("unknown planner {other:?}"))),
    };
    let reference = cfg
        .reference_length
        .unwrap_or_else(|| start.position().dist(goal.position()));
    let metrics = evaluate_path(&path.poses, &grid, &vehicle, reference);
    let feasible = path_is_wheel_feasible(&path.poses, &grid, &vehicle);
    log.log(format!(
        "path: {} poses, feasible={feasible}, deviation={:.4}%, smoothness={:.4} rad/m, clearance={:.4} m",
        path.poses.len(),
        metrics.deviation_percent,
        metrics.smoothness,
        metrics.clearance
    ));
    std::fs::create_dir_all(&cfg.out).map_err(|e| roadtwin_cli::CliError::Io {
        path: cfg.out.clone(),
        source: e,
    })?;
    // Path CSV: s, x, y, yaw.
    let mut csv = String::from("s,x,y,yaw\n");
    let mut s = 0.0;
    for (i, pose) in path.poses.iter().enumerate() {
        if i > 0 {
            s += path.poses[i - 1].position().dist(pose.position());
        }
        csv.push_str(&format!("{s},{},{},{}\n", pose.x, pose.y, pose.yaw));
    }
    let path_csv = cfg.out.join("path.csv");
    std::fs::write(&path_csv, csv).map_err(|e| roadtwin_cli::CliError::Io {
        path: path_csv.clone(),
        source: e,
    })?;
    // Metrics CSV row.
    let metrics_csv = cfg.out.join("metrics.csv");
    let metrics_text = format!(
        "planner,deviation_percent,smoothness_rad_per_m,clearance_m,defect_free,feasible\n{},{},{},{},{},{}\n",
        path.planner,
        metrics.deviation_percent,
        metrics.smoothness,
        metrics.clearance,
        metrics.defect_free,
        feasible
    );
    std::fs::write(&metrics_csv, metrics_text).map_err(|e| roadtwin_cli::CliError::Io {
        path: metrics_csv.clone(),
        source: e,
    })?;
    let mut run = RunManifest::new("plan", serde_json::to_value(&cfg).unwrap());
    run.seed = Some(seed);
    run.record_output(&path_csv);
    run.record_output(&metrics_csv);
    if cfg.svg {
        let overlay = svg::map_overlay(&grid, &path.poses, &vehicle);
        let svg_path = cfg.out.join("overlay.svg");
        std::fs::write(&svg_path, overlay).map_err(|e| roadtwin_cli::CliError::Io {
            path: svg_path.clone(),
            source: e,
        })?;
        run.record_output(&svg_path);
    }
    run.extra.insert(
        "metrics".to_string(),
        serde_json::to_value(&metrics).unwrap(),
    );
    run.write(&cfg.out.join("plan.run.json"))?;
    Ok(format!(
        "plan[{}]: {} poses, deviation {:.2}%, smoothness {:.4} rad/m, clearance {:.2} m, wrote {:?}",
        path.planner,
        path.poses.len(),
        metrics.deviation_percent,
        metrics.smoothness,
        metrics.clearance,
        cfg.out
    ))
}

fn vibration_sweep(args: &RunArgs) -> CmdResult {
    let cfg: SweepConfig = load_config(&args.config, &args.sets)?;
    cfg.validate()?;
    let mut log = logger_for(args.log.as_ref(), &cfg.out);
    let assets = scene::read_scene(&cfg.scene)?;
    let vehicle = cfg.vehicle.unwrap_or_default().model();
    let model = cfg.ride_model();
    std::fs::create_dir_all(&cfg.out).map_err(|e| roadtwin_cli::CliError::Io {
        path: cfg.out.clone(),
        source: e,
    })?;
    let mut csv = String::from("defect,speed_kmh,g_rms,g_peak\n");
    let mut best_lines = Vec::new();
    let mut run = RunManifest::new("vibration-sweep", serde_json::to_value(&cfg).unwrap());
    for section in &cfg.sections {
        let profile = extract_track_profiles(
            &assets,
            p2(section.start[0], section.start[1]),
            p2(section.end[0], section.end[1]),
            &vehicle,
            cfg.ds,
        )?;
        if profile.missing_filled > 0 {
            log.log(format!(
                "section {}: {} missing ray hits filled",
                section.id, profile.missing_filled
            ));
        }
        let sweep = sweep_profile(&profile, &section.id, &cfg.speeds, cfg.alpha, &vehicle, &model)?;
        let mut points = Vec::new();
        for row in &sweep.rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.defect, row.speed_kmh, row.g_rms, row.g_peak
            ));
            points.push((row.speed_kmh, row.g_rms));
            log.log(format!(
                "{} @ {} km/h: g_rms={:.5} g_peak={:.5}",
                row.defect, row.speed_kmh, row.g_rms, row.g_peak
            ));
        }
        let chart = svg::line_chart(
            &format!("vibration degree: {}", section.id),
            "speed (km/h)",
            "g_rms",
            &[(section.id.clone(), points)],
        );
        let chart_path = cfg.out.join(format!("sweep_{}.svg", section.id));
        std::fs::write(&chart_path, chart).map_err(|e| roadtwin_cli::CliError::Io {
            path: chart_path.clone(),
            source: e,
        })?;
        run.record_output(&chart_path);
        best_lines.push(format!("{}@{}", section.id, sweep.best_speed_kmh));
    }
    let csv_path = cfg.out.join("sweep.csv");
    std::fs::write(&csv_path, csv).map_err(|e| roadtwin_cli::CliError::Io {
        path: csv_path.clone(),
        source: e,
    })?;
    run.record_output(&csv_path);
    run.write(&cfg.out.join("sweep.run.json"))?;
    Ok(format!(
        "vibration-sweep: {} sections x {} speeds, best [{}], wrote {:?}",
        cfg.sections.len(),
        cfg.speeds.len(),
        best_lines.join(", "),
        cfg.out
    ))
}
