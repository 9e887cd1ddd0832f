//! Digital road twin generation.
//!
//! Defect models from the library are placed into planar road segments with
//! randomized pose and scale, the intersecting faces are cut out, the gap is
//! re-stitched with a constrained Delaunay annulus against the defect's
//! pseudo-height boundary, surface elevation is restored, and the result is
//! disassembled into per-asset road and defect groups.

mod cut;
mod integrate;
mod placement;
mod scene;
mod segment;
mod validate;

pub use cut::{cut_hole, CutOutcome};
pub use integrate::{FaceTag, IntegratedSegment, SegmentIntegrator};
pub use placement::{sample_placements, Placement, PlacementConfig};
pub use scene::{
    disassemble_assets, generate_scene, integrate_segment, SceneAssets, SceneConfig,
    SceneManifest, SegmentRecord,
};
pub use segment::RoadSegment;
pub use validate::{validate_scene, CheckResult, ValidationReport};

use alloc::string::String;

use crate::geometry::GeometryError;
use crate::model::ModelError;

/// Vertices closer than this are welded during integration.
pub const WELD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TwinError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("library contains no defect models")]
    EmptyLibrary,
    #[error("placement {index} failed after {attempts} attempts ({achieved} placed so far)")]
    PlacementFailed {
        index: u32,
        attempts: u32,
        achieved: u32,
    },
    #[error("projected boundary touches or exits the segment outer boundary")]
    PolygonTouchesBoundary,
    #[error("downward ray cast failed to confirm removal of face {face}")]
    CutConfirmationFailed { face: usize },
    #[error("expected one new hole loop, found {loops} boundary loops")]
    HoleLoopNotFound { loops: usize },
    #[error("{unmatched} defect boundary vertices found no weld partner (placement {placement})")]
    UnweldedBoundary { placement: u32, unmatched: usize },
    #[error("segment {segment:?} has {loops} boundary loops after integration, expected 1")]
    BoundaryLoopMismatch { segment: String, loops: usize },
    #[error("segment {segment:?} outer boundary no longer matches its polygon")]
    SegmentPolygonMismatch { segment: String },
    #[error("segment {segment:?} mesh does not match the stated outer polygon")]
    SegmentMeshMismatch { segment: String },
    #[error("face tags out of sync in segment {segment:?}")]
    UntaggedFaces { segment: String },
    #[error("invalid scene configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, TwinError>;
