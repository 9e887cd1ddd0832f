//! Path metrics: deviation, smoothness, clearance, plus the wheel-replay
//! feasibility check.

use alloc::vec::Vec;

use super::{collision_free, wheel_poses, GridMap, Pose, VehicleModel};
use crate::math::{wrap_angle, Point2};

#[allow(unused_imports)]
use num_traits::Float;

/// Metric resampling step, meters.
pub const METRIC_RESAMPLE_STEP: f64 = 0.5;

/// Replay check spacing, meters.
pub const REPLAY_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathMetrics {
    /// Extra length relative to the reference, percent.
    pub deviation_percent: f64,
    /// Mean absolute heading change per meter, rad/m.
    pub smoothness: f64,
    /// Mean over samples of the nearest wheel-to-defect distance, meters.
    pub clearance: f64,
    /// True when the map has no defects; clearance then reports the map
    /// diagonal rather than a measured distance.
    pub defect_free: bool,
}

/// Polyline length of a pose sequence.
pub fn path_length(poses: &[Pose]) -> f64 {
    poses
        .windows(2)
        .map(|w| w[0].position().dist(w[1].position()))
        .sum()
}

/// Resamples a path at uniform arc length; positions interpolate linearly,
/// yaw interpolates along the shortest angular difference. The final pose
/// is always included.
pub fn resample_path(poses: &[Pose], step: f64) -> Vec<Pose> {
    assert!(step > 0.0);
    if poses.len() < 2 {
        return poses.to_vec();
    }
    let mut cumulative = alloc::vec![0.0];
    for w in poses.windows(2) {
        let d = w[0].position().dist(w[1].position());
        cumulative.push(cumulative.last().unwrap() + d);
    }
    let total = *cumulative.last().unwrap();
    let mut out = Vec::new();
    let mut seg = 0usize;
    let mut s = 0.0;
    loop {
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < s {
            seg += 1;
        }
        let (a, b) = (poses[seg], poses[seg + 1]);
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let t = if seg_len > 0.0 {
            ((s - cumulative[seg]) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let p = a.position().add(b.position().sub(a.position()).scale(t));
        let yaw = a.yaw + t * wrap_angle(b.yaw - a.yaw);
        out.push(Pose::new(p.x, p.y, yaw));
        if s >= total {
            break;
        }
        s = (s + step).min(total);
    }
    out
}

/// Evaluates the three path metrics against a reference length.
///
/// The path is resampled at 0.5 m; deviation compares the original path
/// length to `reference_length`, smoothness sums absolute heading changes
/// over the resampled poses per meter of path, and clearance averages the
/// nearest wheel-to-defect-cell distance. A defect-free map reports the
/// map diagonal as clearance, flagged via `defect_free`.
pub fn evaluate_path(
    poses: &[Pose],
    grid: &GridMap,
    vehicle: &VehicleModel,
    reference_length: f64,
) -> PathMetrics {
    assert!(reference_length > 0.0, "reference length must be positive");
    assert!(poses.len() >= 2, "need at least two poses");
    let length = path_length(poses);
    let deviation_percent = (100.0 * (length - reference_length) / reference_length).max(0.0);
    let samples = resample_path(poses, METRIC_RESAMPLE_STEP);
    let smoothness = samples
        .windows(2)
        .map(|w| wrap_angle(w[1].yaw - w[0].yaw).abs())
        .sum::<f64>()
        / length;
    let defect_centers = grid.defect_centers();
    let (clearance, defect_free) = if defect_centers.is_empty() {
        (grid.diagonal(), true)
    } else {
        let mean = samples
            .iter()
            .map(|pose| {
                wheel_poses(*pose, vehicle)
                    .iter()
                    .map(|w| nearest_distance(*w, &defect_centers))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / samples.len() as f64;
        (mean, false)
    };
    PathMetrics {
        deviation_percent,
        smoothness,
        clearance,
        defect_free,
    }
}

fn nearest_distance(p: Point2, centers: &[Point2]) -> f64 {
    centers
        .iter()
        .map(|c| c.dist(p))
        .fold(f64::INFINITY, f64::min)
}

/// Replays the path at 0.1 m spacing; true iff every resampled pose is
/// wheel-collision-free.
pub fn path_is_wheel_feasible(poses: &[Pose], grid: &GridMap, vehicle: &VehicleModel) -> bool {
    resample_path(poses, REPLAY_STEP)
        .iter()
        .all(|p| collision_free(*p, grid, vehicle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p2;
    use crate::planning::{rasterize, MapBounds};

    fn free_map() -> GridMap {
        let road = alloc::vec![
            p2(-5.0, -5.0),
            p2(25.0, -5.0),
            p2(25.0, 5.0),
            p2(-5.0, 5.0)
        ];
        rasterize(
            &[road],
            &[],
            MapBounds::new(p2(-5.0, -5.0), p2(25.0, 5.0)),
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn straight_path_zero_metrics() {
        let poses: Vec<Pose> = (0..=100)
            .map(|k| Pose::new(k as f64 * 0.2, 0.0, 0.0))
            .collect();
        let m = evaluate_path(&poses, &free_map(), &VehicleModel::default(), 20.0);
        assert!(m.deviation_percent.abs() < 1e-6);
        assert!(m.smoothness.abs() < 1e-12);
        assert!(m.defect_free);
        assert!((m.clearance - free_map().diagonal()).abs() < 1e-9);
    }

    #[test]
    fn semicircle_closed_forms() {
        // Radius 2 semicircle vs its diameter as reference.
        let r = 2.0;
        let n = 20_000;
        let poses: Vec<Pose> = (0..=n)
            .map(|k| {
                let phi = core::f64::consts::PI * k as f64 / n as f64;
                Pose::new(
                    r * phi.cos(),
                    r * phi.sin(),
                    // Tangent heading for CCW travel starting at (r, 0).
                    wrap_angle(phi + core::f64::consts::FRAC_PI_2),
                )
            })
            .collect();
        let m = evaluate_path(&poses, &free_map(), &VehicleModel::default(), 2.0 * r);
        let want_dev = 100.0 * (core::f64::consts::FRAC_PI_2 - 1.0);
        assert!(
            (m.deviation_percent - want_dev).abs() < 1e-4,
            "deviation {} want {want_dev}",
            m.deviation_percent
        );
        assert!(
            (m.smoothness - 1.0 / r).abs() < 1e-6,
            "smoothness {} want {}",
            m.smoothness,
            1.0 / r
        );
    }

    #[test]
    fn clearance_matches_hand_computed_oracle() {
        // One defect cell; straight 3-sample path along y = 0.
        let road = alloc::vec![
            p2(-1.0, -5.0),
            p2(9.0, -5.0),
            p2(9.0, 5.0),
            p2(-1.0, 5.0)
        ];
        let defect = alloc::vec![p2(4.0, 3.0), p2(4.2, 3.0), p2(4.2, 3.2), p2(4.0, 3.2)];
        let grid = rasterize(
            &[road],
            &[defect],
            MapBounds::new(p2(-1.0, -5.0), p2(9.0, 5.0)),
            0.2,
        )
        .unwrap();
        let poses = alloc::vec![
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(0.5, 0.0, 0.0),
            Pose::new(1.0, 0.0, 0.0),
        ];
        let vehicle = VehicleModel::default();
        let m = evaluate_path(&poses, &grid, &vehicle, 1.0);
        // Oracle: the defect cell center is at (4.1, 3.1); min wheel
        // distance per sample, averaged.
        let center = p2(4.1, 3.1);
        let want = poses
            .iter()
            .map(|p| {
                wheel_poses(*p, &vehicle)
                    .iter()
                    .map(|w| w.dist(center))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / 3.0;
        assert!((m.clearance - want).abs() < 1e-9, "{} vs {want}", m.clearance);
    }

    #[test]
    fn resample_includes_endpoint_and_interpolates_yaw() {
        let poses = alloc::vec![
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(1.0, 0.0, 0.4),
            Pose::new(2.3, 0.0, -0.2),
        ];
        let out = resample_path(&poses, 0.5);
        assert!(out.first().unwrap().position().dist(p2(0.0, 0.0)) < 1e-12);
        assert!(out.last().unwrap().position().dist(p2(2.3, 0.0)) < 1e-12);
        for w in out.windows(2) {
            let d = w[0].position().dist(w[1].position());
            assert!(d <= 0.5 + 1e-9);
        }
    }
}
