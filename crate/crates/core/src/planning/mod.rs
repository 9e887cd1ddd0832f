//! Wheel-constrained 2D path planning over defected roads.
//!
//! The scene is rasterized into a grid map; collision checks apply to the
//! four wheel footprints instead of the vehicle body, so paths may glide
//! over defects that pass between the wheel tracks. Four planners are
//! provided (A*, RRT*, state lattice, hybrid A*) plus the three evaluation
//! metrics: deviation, smoothness and clearance.

mod astar;
mod grid;
mod hybrid;
mod lattice;
mod metrics;
mod rrtstar;
mod vehicle;

pub use astar::plan_astar;
pub use grid::{rasterize, rasterize_scene, CellState, GridMap, MapBounds, DEFAULT_RESOLUTION};
pub use hybrid::{plan_hybrid_astar, HybridConfig};
pub use lattice::{plan_lattice, LatticeConfig, RoadFrame};
pub use metrics::{evaluate_path, path_is_wheel_feasible, path_length, resample_path, PathMetrics};
pub use rrtstar::{plan_rrtstar, RrtStarConfig};
pub use vehicle::{collision_free, wheel_poses, Pose, VehicleModel};

use alloc::string::String;
use alloc::vec::Vec;

/// A planned path with its provenance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlannedPath {
    pub poses: Vec<Pose>,
    pub planner: String,
    /// Parameter snapshot (name, value), for the run manifest.
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("map bounds are empty or resolution is not positive")]
    BadMapShape,
    #[error("start pose is not collision-free")]
    StartBlocked,
    #[error("goal pose is not collision-free")]
    GoalBlocked,
    #[error("unreachable: no wheel-feasible path (explored {explored} states)")]
    Unreachable { explored: usize },
    #[error("unreachable: no path within {iterations} iterations (tree size {tree_size})")]
    IterationsExhausted { iterations: usize, tree_size: usize },
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, PlanError>;
