//! Hierarchical road model creation.
//!
//! Two reconstruction streams: a coarse one that meshes mask-filtered,
//! ground-leveled point clouds into 2.5D road surfaces, and a fine one that
//! turns road-relative elevation maps into watertight defect meshes with a
//! zeroed pseudo-height boundary. Results are compiled into a model library.

mod cloud;
mod defect;
mod elevation;
mod library;
mod surface;

pub use cloud::{filter_points_by_mask, level_to_ground, RegisteredCloud, SemanticMask};
pub use defect::{
    build_defect_model, DefectBuildOptions, DefectMetadata, DefectModel, BOUNDARY_FLATNESS_TOL,
    RING_PLANARITY_RMS_LIMIT,
};
pub use elevation::{
    extract_defect_instances, sample_defect_points, DefectInstance, DefectSample, ElevationMap,
    SampleLabel, SampledDefect,
};
pub use library::{EntryKind, EntrySummary, LibraryEntry, ModelLibrary};
pub use surface::{reconstruct_surface, SurfaceModel, DEFAULT_SURFACE_LEAF};

use alloc::string::String;

use crate::geometry::GeometryError;

/// Default ground-plane inlier tolerance (road-texture noise scale).
pub const DEFAULT_GROUND_INLIER_TOL: f64 = 0.02;

/// Default elevation threshold below which a cell is a defect candidate.
pub const DEFAULT_DEPTH_THRESHOLD: f64 = -0.015;

/// Default defect sampling stride in cells.
pub const DEFAULT_SAMPLE_STRIDE: u32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("mask projection matrix is rank deficient")]
    DegenerateProjection,
    #[error("mask dimensions or data length invalid ({width}x{height}, {len} samples)")]
    BadMaskShape { width: u32, height: u32, len: usize },
    #[error("elevation map shape invalid ({width}x{height}, {len} samples, cell {cell_size})")]
    BadElevationShape {
        width: u32,
        height: u32,
        len: usize,
        cell_size: f64,
    },
    #[error("too few points after downsampling: {count}")]
    TooFewSurfacePoints { count: usize },
    #[error("vertices {a} and {b} project to the same planar location")]
    DuplicatePlanarCoordinates { a: u32, b: u32 },
    #[error("defect ring has {count} points, need at least 3")]
    RingTooSmall { count: usize },
    #[error("defect ring points are collinear")]
    RingCollinear,
    #[error("defect ring is not planar: RMS residual {rms} m exceeds {limit} m")]
    RingNotPlanar { rms: f64, limit: f64 },
    #[error("defect mesh has {count} boundary loops, expected exactly 1")]
    WrongBoundaryLoopCount { count: usize },
    #[error("defect instance is empty")]
    EmptyInstance,
    #[error("boundary vertex {vertex} deviates from the pseudo-height plane by {z} m")]
    BoundaryNotFlat { vertex: u32, z: f64 },
    #[error("vertex {vertex} rises {z} m above the boundary plane (not a depression)")]
    NotADepression { vertex: u32, z: f64 },
    #[error("library already contains an entry named {0:?}")]
    DuplicateEntry(String),
    #[error("library has no entry named {0:?}")]
    MissingEntry(String),
    #[error("library entry {0:?} is not a {1}")]
    WrongKind(String, &'static str),
}

pub type Result<T> = core::result::Result<T, ModelError>;
