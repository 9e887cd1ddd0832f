//! IO, file formats and pipeline orchestration around `roadtwin-core`.
//!
//! Interchange formats are all textually auditable: PLY for point clouds
//! and library meshes, OBJ for scene assets, PGM (+ JSON sidecar) for grid
//! and elevation maps, JSON for configs and manifests, CSV for results and
//! SVG for plots. Every writer is deterministic; timestamps appear only in
//! log files.

pub mod config;
pub mod library;
pub mod logger;
pub mod manifest;
pub mod obj;
pub mod pgm;
pub mod ply;
pub mod scene;
pub mod svg;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed PLY header: {detail}")]
    PlyHeader { path: PathBuf, detail: String },
    #[error("{path}: truncated PLY body: expected {expected} more bytes for {what}")]
    PlyTruncated {
        path: PathBuf,
        expected: usize,
        what: String,
    },
    #[error("{path}: unsupported PLY property type {type_name:?} for {property:?}")]
    PlyUnsupportedType {
        path: PathBuf,
        type_name: String,
        property: String,
    },
    #[error("{path}: malformed PGM: {detail}")]
    Pgm { path: PathBuf, detail: String },
    #[error("{path}: PGM maxval {maxval} unsupported here (expected {expected})")]
    PgmMaxval {
        path: PathBuf,
        maxval: u32,
        expected: u32,
    },
    #[error("{path}: sidecar does not match raster: {detail}")]
    SidecarMismatch { path: PathBuf, detail: String },
    #[error("{path}: {detail}")]
    Json { path: PathBuf, detail: String },
    #[error("library {path}: missing file {file}")]
    LibraryMissingFile { path: PathBuf, file: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: malformed OBJ: {detail}")]
    Obj { path: PathBuf, detail: String },
    #[error(transparent)]
    Geometry(#[from] roadtwin_core::geometry::GeometryError),
    #[error(transparent)]
    Model(#[from] roadtwin_core::model::ModelError),
    #[error(transparent)]
    Twin(#[from] roadtwin_core::twin::TwinError),
    #[error(transparent)]
    Plan(#[from] roadtwin_core::planning::PlanError),
    #[error(transparent)]
    Vibration(#[from] roadtwin_core::vibration::VibrationError),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Thread cap from `ROADTWIN_THREADS` (0 or unset = automatic).
pub fn thread_cap() -> Option<usize> {
    std::env::var("ROADTWIN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}
