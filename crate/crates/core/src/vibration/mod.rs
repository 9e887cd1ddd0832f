//! Speed-control evaluation over unavoidable defects.
//!
//! Wheel-track height profiles are extracted from scene meshes by downward
//! ray casts, a kinematic wheel follower with gravity-limited descent
//! simulates constant-speed traversal, and the vibration degree
//! `g = sqrt(wx^2 + wy^2 + alpha * az^2)` condenses the trace per speed.

mod degree;
mod profile;
mod simulate;

pub use degree::{g_series, speed_sweep, sweep_profile, SweepResult, VibrationDegree, VibrationSummary};
pub use profile::{extract_track_profiles, TrackProfile};
pub use simulate::{
    simulate_traversal, simulate_traversal_full, RideModel, SuspensionParams, TraversalOutput,
    VibrationTrace,
};

/// Default arc-length sampling step, meters.
pub const DEFAULT_PROFILE_STEP: f64 = 0.01;

/// Default vibration-degree weight on vertical acceleration.
pub const DEFAULT_ALPHA: f64 = 0.1;

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VibrationError {
    #[error("arc-length step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("speed list must be nonempty with positive speeds")]
    InvalidSpeeds,
    #[error("vibration trace is empty")]
    EmptyTrace,
    #[error("trajectory leaves the scene meshes: {missing} of {total} ray casts missed")]
    TrajectoryOffMesh { missing: usize, total: usize },
    #[error("track profile needs at least 2 samples, got {0}")]
    ProfileTooShort(usize),
}

pub type Result<T> = core::result::Result<T, VibrationError>;
