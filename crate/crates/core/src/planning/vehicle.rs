//! Vehicle model, poses and wheel-level collision checks.

use super::{CellState, GridMap};
use crate::math::{p2, wrap_angle, Point2};

#[allow(unused_imports)]
use num_traits::Float;

/// Rear-axle referenced vehicle with four wheels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VehicleModel {
    /// Track width, meters.
    pub width: f64,
    /// Rear-to-front wheel distance, meters.
    pub wheelbase: f64,
    /// Wheel footprint disc radius, meters.
    pub wheel_radius: f64,
}

impl Default for VehicleModel {
    fn default() -> Self {
        VehicleModel {
            width: 2.0,
            wheelbase: 3.0,
            wheel_radius: 0.15,
        }
    }
}

/// Planar pose; yaw normalized to (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        Pose {
            x,
            y,
            yaw: wrap_angle(yaw),
        }
    }

    pub fn position(&self) -> Point2 {
        p2(self.x, self.y)
    }
}

/// Wheel centers for a pose: rear axle at the pose, order
/// [rear-left, rear-right, front-left, front-right].
pub fn wheel_poses(pose: Pose, vehicle: &VehicleModel) -> [Point2; 4] {
    let (s, c) = pose.yaw.sin_cos();
    let place = |lon: f64, lat: f64| {
        p2(
            pose.x + c * lon - s * lat,
            pose.y + s * lon + c * lat,
        )
    };
    let half = vehicle.width / 2.0;
    [
        place(0.0, half),
        place(0.0, -half),
        place(vehicle.wheelbase, half),
        place(vehicle.wheelbase, -half),
    ]
}

/// Wheel-level feasibility: each wheel center must sit on a free cell and
/// no defect cell center may fall inside a wheel footprint disc. The body
/// between the wheel tracks is deliberately unchecked so the vehicle may
/// glide over defects.
pub fn collision_free(pose: Pose, grid: &GridMap, vehicle: &VehicleModel) -> bool {
    for wheel in wheel_poses(pose, vehicle) {
        match grid.cell_of(wheel) {
            Some((c, r)) => {
                if grid.state(c, r) != CellState::Free {
                    return false;
                }
            }
            None => return false,
        }
        // Any defect cell center within the wheel disc blocks the pose.
        let r_cells = (vehicle.wheel_radius / grid.resolution).ceil() as i64 + 1;
        let (wc, wr) = grid.cell_of(wheel).expect("checked above");
        for dr in -r_cells..=r_cells {
            for dc in -r_cells..=r_cells {
                let (c, r) = (wc as i64 + dc, wr as i64 + dr);
                if c < 0 || r < 0 || c >= grid.width as i64 || r >= grid.height as i64 {
                    continue;
                }
                let (c, r) = (c as u32, r as u32);
                if grid.state(c, r) == CellState::Defect
                    && grid.cell_center(c, r).dist(wheel) <= vehicle.wheel_radius
                {
                    return false;
                }
            }
        }
    }
    true
}
