//! State lattice planner: stations along a road-aligned frame, lateral
//! offsets per station, cubic-spline edges with zero lateral slope at the
//! endpoints.

use alloc::string::String;
use alloc::vec::Vec;

use super::{collision_free, GridMap, PlanError, PlannedPath, Pose, Result, VehicleModel};
use crate::math::{p2, wrap_angle, Point2};

#[allow(unused_imports)]
use num_traits::Float;

/// Road-aligned frame: a straight centerline with lateral offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoadFrame {
    pub origin: Point2,
    pub heading: f64,
    pub length: f64,
}

impl RoadFrame {
    /// World position of station `s`, lateral offset `l`.
    pub fn world(&self, s: f64, l: f64) -> Point2 {
        let (sin, cos) = self.heading.sin_cos();
        p2(
            self.origin.x + cos * s - sin * l,
            self.origin.y + sin * s + cos * l,
        )
    }

    /// (station, lateral) coordinates of a world point.
    pub fn local(&self, p: Point2) -> (f64, f64) {
        let d = p.sub(self.origin);
        let (sin, cos) = self.heading.sin_cos();
        (cos * d.x + sin * d.y, -sin * d.x + cos * d.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeConfig {
    /// Longitudinal station spacing, meters.
    pub station_step: f64,
    /// Lateral node spacing, meters.
    pub lateral_step: f64,
    /// Maximum absolute lateral offset, meters.
    pub max_lateral: f64,
    /// Edge sampling step for wheel checks, meters.
    pub sample_step: f64,
    /// Weight of accumulated |heading change| in the edge cost.
    pub curvature_weight: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            station_step: 5.1,
            lateral_step: 1.0,
            max_lateral: 3.0,
            sample_step: 0.1,
            curvature_weight: 1.0,
        }
    }
}

/// Hermite lateral blend with zero slope at both ends.
fn blend(l0: f64, l1: f64, t: f64) -> f64 {
    let h01 = t * t * (3.0 - 2.0 * t);
    l0 + (l1 - l0) * h01
}

/// Samples one spline edge; `None` when any sample fails the wheel check.
fn sample_edge(
    frame: &RoadFrame,
    s0: f64,
    s1: f64,
    l0: f64,
    l1: f64,
    grid: &GridMap,
    vehicle: &VehicleModel,
    step: f64,
) -> Option<(Vec<Pose>, f64, f64)> {
    let ds = s1 - s0;
    let n = (ds / step).ceil().max(1.0) as usize;
    let mut poses = Vec::with_capacity(n + 1);
    let mut length = 0.0;
    let mut turning = 0.0;
    let mut prev: Option<(Point2, f64)> = None;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let s = s0 + ds * t;
        let l = blend(l0, l1, t);
        // dl/ds of the Hermite blend.
        let dl = (l1 - l0) * 6.0 * t * (1.0 - t) / ds;
        let yaw = wrap_angle(frame.heading + dl.atan());
        let p = frame.world(s, l);
        if !collision_free(Pose::new(p.x, p.y, yaw), grid, vehicle) {
            return None;
        }
        if let Some((pp, pyaw)) = prev {
            length += p.dist(pp);
            turning += wrap_angle(yaw - pyaw).abs();
        }
        poses.push(Pose::new(p.x, p.y, yaw));
        prev = Some((p, yaw));
    }
    Some((poses, length, turning))
}

/// Plans over the lattice: each node connects to the three nearest lateral
/// nodes of the next station; cost is arc length plus a curvature penalty.
pub fn plan_lattice(
    grid: &GridMap,
    start: Pose,
    goal: Pose,
    vehicle: &VehicleModel,
    frame: &RoadFrame,
    config: &LatticeConfig,
) -> Result<PlannedPath> {
    if config.station_step <= 0.0 || config.lateral_step <= 0.0 || config.sample_step <= 0.0 {
        return Err(PlanError::InvalidConfig(String::from(
            "lattice steps must be positive",
        )));
    }
    if !collision_free(start, grid, vehicle) {
        return Err(PlanError::StartBlocked);
    }
    if !collision_free(goal, grid, vehicle) {
        return Err(PlanError::GoalBlocked);
    }
    // Stations every station_step, final station at the frame end.
    let mut stations = Vec::new();
    let mut s = 0.0;
    while s < frame.length - 1e-9 {
        stations.push(s);
        s += config.station_step;
    }
    stations.push(frame.length);
    let half = (config.max_lateral / config.lateral_step + 1e-9).floor() as i64;
    let laterals: Vec<f64> = (-half..=half)
        .map(|j| j as f64 * config.lateral_step)
        .collect();
    let nl = laterals.len();
    if stations.len() < 2 {
        return Err(PlanError::InvalidConfig(String::from("frame too short")));
    }
    // Start and goal snap to the nearest lateral node of their stations.
    let (_, start_l) = frame.local(start.position());
    let (_, goal_l) = frame.local(goal.position());
    let nearest_lateral = |l: f64| -> usize {
        (0..nl)
            .min_by(|&a, &b| {
                (laterals[a] - l)
                    .abs()
                    .total_cmp(&(laterals[b] - l).abs())
                    .then(a.cmp(&b))
            })
            .unwrap()
    };
    let start_j = nearest_lateral(start_l);
    let goal_j = nearest_lateral(goal_l);

    // Forward DP over the layered DAG.
    let inf = f64::INFINITY;
    let mut cost = alloc::vec![alloc::vec![inf; nl]; stations.len()];
    let mut from: Vec<Vec<usize>> = alloc::vec![alloc::vec![usize::MAX; nl]; stations.len()];
    let mut edges: Vec<Vec<Option<Vec<Pose>>>> =
        (0..stations.len()).map(|_| alloc::vec![None; nl]).collect();
    cost[0][start_j] = 0.0;
    let mut explored = 0usize;
    for k in 0..stations.len() - 1 {
        for j in 0..nl {
            if cost[k][j] == inf {
                continue;
            }
            for jn in j.saturating_sub(1)..(j + 2).min(nl) {
                explored += 1;
                let Some((poses, length, turning)) = sample_edge(
                    frame,
                    stations[k],
                    stations[k + 1],
                    laterals[j],
                    laterals[jn],
                    grid,
                    vehicle,
                    config.sample_step,
                ) else {
                    continue;
                };
                let c = cost[k][j] + length + config.curvature_weight * turning;
                if c < cost[k + 1][jn] {
                    cost[k + 1][jn] = c;
                    from[k + 1][jn] = j;
                    edges[k + 1][jn] = Some(poses);
                }
            }
        }
    }
    let last = stations.len() - 1;
    if cost[last][goal_j] == inf {
        return Err(PlanError::Unreachable { explored });
    }
    // Backtrack, concatenating edge samples (dropping duplicate joints).
    let mut chain: Vec<(usize, usize)> = Vec::new();
    let mut j = goal_j;
    for k in (1..=last).rev() {
        chain.push((k, j));
        j = from[k][j];
    }
    chain.reverse();
    let mut poses: Vec<Pose> = Vec::new();
    for (k, j) in chain {
        let edge = edges[k][j].as_ref().expect("edge recorded with cost");
        let skip = usize::from(!poses.is_empty());
        poses.extend(edge.iter().skip(skip).copied());
    }
    Ok(PlannedPath {
        poses,
        planner: String::from("lattice"),
        params: alloc::vec![
            (String::from("station_step"), config.station_step),
            (String::from("lateral_step"), config.lateral_step),
            (String::from("curvature_weight"), config.curvature_weight),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::{path_length, rasterize, MapBounds};

    fn road(defects: &[Vec<Point2>]) -> GridMap {
        let poly = alloc::vec![
            p2(-2.0, -5.0),
            p2(42.0, -5.0),
            p2(42.0, 5.0),
            p2(-2.0, 5.0)
        ];
        rasterize(
            &[poly],
            defects,
            MapBounds::new(p2(-2.0, -5.0), p2(42.0, 5.0)),
            0.2,
        )
        .unwrap()
    }

    fn frame() -> RoadFrame {
        RoadFrame {
            origin: p2(0.0, 0.0),
            heading: 0.0,
            length: 35.0,
        }
    }

    #[test]
    fn no_defects_follows_centerline() {
        let grid = road(&[]);
        let path = plan_lattice(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(35.0, 0.0, 0.0),
            &VehicleModel::default(),
            &frame(),
            &LatticeConfig::default(),
        )
        .unwrap();
        for p in &path.poses {
            assert!(p.y.abs() < 1e-9, "centerline path");
        }
        assert!((path_length(&path.poses) - 35.0).abs() < 1e-6);
    }

    #[test]
    fn blocking_defect_detours_one_step_and_returns() {
        // Sits on the left wheel track of the centerline: blocks l = 0 but
        // clears the adjacent lateral nodes.
        let defect = alloc::vec![
            p2(14.0, 0.7),
            p2(17.0, 0.7),
            p2(17.0, 1.3),
            p2(14.0, 1.3)
        ];
        let grid = road(core::slice::from_ref(&defect));
        let path = plan_lattice(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(35.0, 0.0, 0.0),
            &VehicleModel::default(),
            &frame(),
            &LatticeConfig::default(),
        )
        .unwrap();
        // Path starts and ends on the centerline and detours in between.
        assert!(path.poses.first().unwrap().y.abs() < 1e-9);
        assert!(path.poses.last().unwrap().y.abs() < 1e-9);
        let max_l = path.poses.iter().map(|p| p.y.abs()).fold(0.0, f64::max);
        assert!(
            max_l > 0.9 && max_l < 1.1,
            "one-lateral-step detour expected, got {max_l}"
        );
        // Exhaustive graph-search oracle: brute-force enumerate all lateral
        // sequences (3-connected) and confirm the DP found the cheapest.
        let oracle = brute_force_best(&grid, &frame(), &LatticeConfig::default());
        let got = path_cost(&path.poses);
        assert!((got - oracle).abs() < 1e-6, "DP {got} vs oracle {oracle}");
    }

    #[test]
    fn single_offset_with_block_unreachable() {
        let defect = alloc::vec![
            p2(14.0, 0.7),
            p2(17.0, 0.7),
            p2(17.0, 1.3),
            p2(14.0, 1.3)
        ];
        let grid = road(core::slice::from_ref(&defect));
        let config = LatticeConfig {
            max_lateral: 0.0,
            ..Default::default()
        };
        let err = plan_lattice(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(35.0, 0.0, 0.0),
            &VehicleModel::default(),
            &frame(),
            &config,
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::Unreachable { .. }));
    }

    fn path_cost(poses: &[Pose]) -> f64 {
        let mut c = 0.0;
        for w in poses.windows(2) {
            c += w[0].position().dist(w[1].position());
            c += wrap_angle(w[1].yaw - w[0].yaw).abs();
        }
        c
    }

    fn brute_force_best(grid: &GridMap, frame: &RoadFrame, config: &LatticeConfig) -> f64 {
        let vehicle = VehicleModel::default();
        let mut stations = Vec::new();
        let mut s = 0.0;
        while s < frame.length - 1e-9 {
            stations.push(s);
            s += config.station_step;
        }
        stations.push(frame.length);
        let half = (config.max_lateral / config.lateral_step + 1e-9).floor() as i64;
        let laterals: Vec<f64> = (-half..=half)
            .map(|j| j as f64 * config.lateral_step)
            .collect();
        let center = laterals.iter().position(|&l| l == 0.0).unwrap();
        let mut best = f64::INFINITY;
        // DFS over all sequences; tiny graph so this is exhaustive.
        fn dfs(
            k: usize,
            j: usize,
            acc: f64,
            stations: &[f64],
            laterals: &[f64],
            grid: &GridMap,
            frame: &RoadFrame,
            vehicle: &VehicleModel,
            config: &LatticeConfig,
            center: usize,
            best: &mut f64,
        ) {
            if k == stations.len() - 1 {
                if j == center {
                    *best = (*best).min(acc);
                }
                return;
            }
            for jn in j.saturating_sub(1)..(j + 2).min(laterals.len()) {
                if let Some((_, len, turn)) = sample_edge(
                    frame,
                    stations[k],
                    stations[k + 1],
                    laterals[j],
                    laterals[jn],
                    grid,
                    vehicle,
                    config.sample_step,
                ) {
                    dfs(
                        k + 1,
                        jn,
                        acc + len + config.curvature_weight * turn,
                        stations,
                        laterals,
                        grid,
                        frame,
                        vehicle,
                        config,
                        center,
                        best,
                    );
                }
            }
        }
        dfs(
            0, center, 0.0, &stations, &laterals, grid, frame, &vehicle, config, center,
            &mut best,
        );
        best
    }
}
