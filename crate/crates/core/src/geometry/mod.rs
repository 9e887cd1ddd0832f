//! Pure geometric kernel.
//!
//! All operations are pure functions over immutable inputs and are safe to
//! call concurrently. No exact-arithmetic predicates: plain `f64` with the
//! documented epsilons.

mod boundary;
mod cdt;
mod delaunay;
mod height;
mod mesh;
mod plane;
mod polygon;
mod ray;
mod voxel;

pub use boundary::{extract_boundary_loops, BoundaryLoop};
pub use cdt::{constrained_delaunay_2d, CdtProblem};
pub use delaunay::delaunay_2d;
pub use height::HeightIndex;
pub use mesh::TriMesh;
pub use plane::{fit_plane_least_squares, fit_plane_robust, Plane, RANSAC_ITERATIONS};
pub use polygon::{
    overlap_witness, point_in_polygon, point_strictly_in_polygon, point_strictly_in_triangle,
    polygon_area, polygons_disjoint, segments_intersect, triangle_polygon_overlap_2d,
    TriPolyOverlap,
};
pub use ray::{ray_triangle_intersect, RayCast, RayHit, DEGENERACY_EPS};
pub use voxel::voxel_downsample;

use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the geometric kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("face {face} references vertex {vertex} out of bounds ({vertices} vertices)")]
    FaceIndexOutOfBounds {
        face: usize,
        vertex: u32,
        vertices: usize,
    },
    #[error("face {face} repeats a vertex index")]
    DegenerateFaceIndices { face: usize },
    #[error("faces {first} and {second} share the same vertex triple")]
    DuplicateFace { first: usize, second: usize },
    #[error("vertex {vertex} is not referenced by any face")]
    UnreferencedVertex { vertex: u32 },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: u32 },
    #[error("edge ({a}, {b}) is used by {count} faces (non-manifold)")]
    NonManifoldEdge { a: u32, b: u32, count: usize },
    #[error("boundary edges do not form closed loops near vertex {vertex}")]
    OpenBoundaryChain { vertex: u32 },
    #[error("triangulation needs at least 3 points, got {count}")]
    TooFewPoints { count: usize },
    #[error("all input points are collinear")]
    CollinearPoints,
    #[error("duplicate points within tolerance: {0:?}")]
    DuplicatePoints(Vec<(u32, u32)>),
    #[error("constraint edge endpoint {index} out of bounds")]
    ConstraintIndexOutOfBounds { index: u32 },
    #[error("constraint edges {first:?} and {second:?} cross")]
    ConstraintsCross { first: (u32, u32), second: (u32, u32) },
    #[error("constraint edge ({a}, {b}) passes through vertex {vertex}")]
    ConstraintThroughVertex { a: u32, b: u32, vertex: u32 },
    #[error("plane fit needs at least 3 points, got {count}")]
    PlaneTooFewPoints { count: usize },
    #[error("plane fit inliers are rank deficient (collinear or coincident)")]
    PlaneRankDeficient,
    #[error("height query on an empty point set")]
    EmptyHeightIndex,
    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, GeometryError>;
