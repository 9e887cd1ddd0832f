//! Hybrid A*: continuous poses over a discretized (x, y, yaw) grid with
//! bicycle-model arc primitives and steering / lane-change penalties.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::rrtstar::edge_free;
use super::{collision_free, GridMap, PlanError, PlannedPath, Pose, Result, VehicleModel};
use crate::math::{wrap_angle, Point2};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HybridConfig {
    /// Yaw discretization, radians (15 degrees).
    pub yaw_resolution: f64,
    /// Arc primitive length, meters.
    pub primitive_length: f64,
    /// Steering angles of the primitive set, radians.
    pub steering_angles: [f64; 3],
    /// Integration / collision step along primitives, meters.
    pub step: f64,
    /// Cost weight per radian of steering.
    pub steer_weight: f64,
    /// Cost weight per meter of lateral offset change.
    pub lane_weight: f64,
    /// Goal position tolerance, meters.
    pub goal_pos_tol: f64,
    /// Goal yaw tolerance, radians.
    pub goal_yaw_tol: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            yaw_resolution: 15.0f64.to_radians(),
            primitive_length: 1.0,
            steering_angles: [-30.0f64.to_radians(), 0.0, 30.0f64.to_radians()],
            step: 0.1,
            steer_weight: 0.5,
            lane_weight: 0.2,
            goal_pos_tol: 1.0,
            goal_yaw_tol: 15.0f64.to_radians(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapKey {
    f: f64,
    h: f64,
    seq: u64,
}

impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.f
            .total_cmp(&other.f)
            .then(self.h.total_cmp(&other.h))
            .then(self.seq.cmp(&other.seq))
    }
}

type Key = (u32, u32, u16); // (col, row, yaw bin)

fn key_of(pose: Pose, grid: &GridMap, yaw_res: f64) -> Option<Key> {
    let (c, r) = grid.cell_of(pose.position())?;
    let bins = (2.0 * core::f64::consts::PI / yaw_res).round() as u16;
    let mut bin = ((pose.yaw + core::f64::consts::PI) / yaw_res).floor() as i64;
    if bin < 0 {
        bin = 0;
    }
    if bin >= bins as i64 {
        bin = bins as i64 - 1;
    }
    Some((c, r, bin as u16))
}

/// Forward-integrates one arc primitive, checking wheels every `step`.
fn roll_primitive(
    from: Pose,
    steering: f64,
    config: &HybridConfig,
    grid: &GridMap,
    vehicle: &VehicleModel,
) -> Option<Pose> {
    let n = (config.primitive_length / config.step).round().max(1.0) as usize;
    let h = config.primitive_length / n as f64;
    let curvature = steering.tan() / vehicle.wheelbase;
    let mut pose = from;
    for _ in 0..n {
        let yaw = pose.yaw + h * curvature;
        let pose_next = Pose::new(
            pose.x + h * yaw.cos(),
            pose.y + h * yaw.sin(),
            yaw,
        );
        if !collision_free(pose_next, grid, vehicle) {
            return None;
        }
        pose = pose_next;
    }
    Some(pose)
}

/// Signed lateral offset from the start-goal line (the lane reference).
fn lateral_offset(p: Point2, start: Point2, goal: Point2) -> f64 {
    let d = goal.sub(start);
    let len = d.norm();
    if len < 1e-9 {
        return 0.0;
    }
    d.cross(p.sub(start)) / len
}

/// Plans with hybrid A*: forward arcs at the configured steering angles,
/// continuous pose stored per (cell, yaw bin), first arrival wins.
pub fn plan_hybrid_astar(
    grid: &GridMap,
    start: Pose,
    goal: Pose,
    vehicle: &VehicleModel,
    config: &HybridConfig,
) -> Result<PlannedPath> {
    if !collision_free(start, grid, vehicle) {
        return Err(PlanError::StartBlocked);
    }
    if !collision_free(goal, grid, vehicle) {
        return Err(PlanError::GoalBlocked);
    }
    let start_key = key_of(start, grid, config.yaw_resolution).ok_or(PlanError::StartBlocked)?;
    let goal_pos = goal.position();
    let mut best_g: BTreeMap<Key, f64> = BTreeMap::new();
    let mut pose_of: BTreeMap<Key, Pose> = BTreeMap::new();
    let mut parent: BTreeMap<Key, (Key, f64)> = BTreeMap::new(); // (parent, steering)
    let mut closed: BTreeMap<Key, ()> = BTreeMap::new();
    let mut heap: BinaryHeap<Reverse<(HeapKey, Key)>> = BinaryHeap::new();
    let mut seq = 0u64;
    best_g.insert(start_key, 0.0);
    pose_of.insert(start_key, start);
    let h0 = start.position().dist(goal_pos);
    heap.push(Reverse((HeapKey { f: h0, h: h0, seq }, start_key)));
    let mut reached: Option<Key> = None;
    while let Some(Reverse((key, state))) = heap.pop() {
        if closed.contains_key(&state) {
            continue;
        }
        closed.insert(state, ());
        let pose = pose_of[&state];
        if pose.position().dist(goal_pos) <= config.goal_pos_tol
            && wrap_angle(pose.yaw - goal.yaw).abs() <= config.goal_yaw_tol + 1e-12
        {
            reached = Some(state);
            break;
        }
        let g = key.f - key.h;
        for &steering in &config.steering_angles {
            let Some(next) = roll_primitive(pose, steering, config, grid, vehicle) else {
                continue;
            };
            let Some(next_key) = key_of(next, grid, config.yaw_resolution) else {
                continue;
            };
            if closed.contains_key(&next_key) {
                continue;
            }
            let lane_change = (lateral_offset(next.position(), start.position(), goal_pos)
                - lateral_offset(pose.position(), start.position(), goal_pos))
            .abs();
            let cost = config.primitive_length
                + config.steer_weight * steering.abs()
                + config.lane_weight * lane_change;
            let ng = g + cost;
            if best_g.get(&next_key).map_or(true, |&old| ng < old) {
                best_g.insert(next_key, ng);
                pose_of.insert(next_key, next);
                parent.insert(next_key, (state, steering));
                let h = next.position().dist(goal_pos);
                seq += 1;
                heap.push(Reverse((HeapKey { f: ng + h, h, seq }, next_key)));
            }
        }
    }
    let Some(reached) = reached else {
        return Err(PlanError::Unreachable {
            explored: closed.len(),
        });
    };
    // Backtrack primitives and regenerate their sampled poses.
    let mut chain: Vec<(Key, f64)> = Vec::new();
    let mut cur = reached;
    while let Some(&(p, steering)) = parent.get(&cur) {
        chain.push((cur, steering));
        cur = p;
    }
    chain.reverse();
    let mut poses = alloc::vec![start];
    let mut pose = start;
    for &(key, steering) in &chain {
        let n = (config.primitive_length / config.step).round().max(1.0) as usize;
        let h = config.primitive_length / n as f64;
        let curvature = steering.tan() / vehicle.wheelbase;
        for _ in 0..n {
            let yaw = pose.yaw + h * curvature;
            pose = Pose::new(pose.x + h * yaw.cos(), pose.y + h * yaw.sin(), yaw);
            poses.push(pose);
        }
        debug_assert!(pose.position().dist(pose_of[&key].position()) < 1e-9);
    }
    // Close the final gap to the goal when the straight connector is free
    // and its heading change stays within the bicycle curvature bound.
    let end = poses.last().copied().unwrap();
    let gap = end.position().dist(goal_pos);
    if gap > 1e-9 && edge_free(end.position(), goal_pos, grid, vehicle, config.step) {
        let d = goal_pos.sub(end.position());
        let dir = d.y.atan2(d.x);
        let max_curvature = config
            .steering_angles
            .iter()
            .fold(0.0f64, |m, a| m.max(a.abs()))
            .tan()
            / vehicle.wheelbase;
        if wrap_angle(dir - end.yaw).abs() <= max_curvature * gap {
            poses.push(Pose::new(goal_pos.x, goal_pos.y, dir));
        }
    }
    Ok(PlannedPath {
        poses,
        planner: String::from("hybrid_astar"),
        params: alloc::vec![
            (String::from("yaw_resolution"), config.yaw_resolution),
            (String::from("primitive_length"), config.primitive_length),
            (String::from("steer_weight"), config.steer_weight),
            (String::from("lane_weight"), config.lane_weight),
        ],
    })
}
