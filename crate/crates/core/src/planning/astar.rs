//! 8-connected grid A* with wheel checks.
//!
//! A point search has no yaw, so the heading used for wheel checks is the
//! parent-to-child direction; the search state is (cell, incoming heading)
//! to keep optimality under heading-dependent feasibility.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{collision_free, GridMap, PlanError, PlannedPath, Pose, Result, VehicleModel};

#[allow(unused_imports)]
use num_traits::Float;

const DIRS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

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

type State = (u32, u32, u8); // (col, row, incoming direction)

/// Plans an 8-connected grid path from `start` to `goal`. The returned path
/// visits cell centers; optimal in path length among wheel-feasible paths.
pub fn plan_astar(
    grid: &GridMap,
    start: Pose,
    goal: Pose,
    vehicle: &VehicleModel,
) -> Result<PlannedPath> {
    if !collision_free(start, grid, vehicle) {
        return Err(PlanError::StartBlocked);
    }
    if !collision_free(goal, grid, vehicle) {
        return Err(PlanError::GoalBlocked);
    }
    let start_cell = grid.cell_of(start.position()).ok_or(PlanError::StartBlocked)?;
    let goal_cell = grid.cell_of(goal.position()).ok_or(PlanError::GoalBlocked)?;
    let goal_center = grid.cell_center(goal_cell.0, goal_cell.1);
    let res = grid.resolution;

    let mut best_g: BTreeMap<State, f64> = BTreeMap::new();
    let mut parent: BTreeMap<State, State> = BTreeMap::new();
    let mut heap: BinaryHeap<Reverse<(HeapKey, State)>> = BinaryHeap::new();
    let mut seq = 0u64;
    // Start uses its own yaw (already verified); direction 8 marks "none".
    let start_state: State = (start_cell.0, start_cell.1, 8);
    let h0 = grid.cell_center(start_cell.0, start_cell.1).dist(goal_center);
    best_g.insert(start_state, 0.0);
    heap.push(Reverse((HeapKey { f: h0, h: h0, seq }, start_state)));
    let mut closed: BTreeMap<State, ()> = BTreeMap::new();
    let mut goal_state: Option<State> = None;
    while let Some(Reverse((key, state))) = heap.pop() {
        if closed.contains_key(&state) {
            continue;
        }
        closed.insert(state, ());
        let (col, row, _) = state;
        if (col, row) == goal_cell {
            goal_state = Some(state);
            break;
        }
        let g = key.f - key.h;
        for (d, &(dc, dr)) in DIRS.iter().enumerate() {
            let (nc, nr) = (col as i64 + dc, row as i64 + dr);
            if nc < 0 || nr < 0 || nc >= grid.width as i64 || nr >= grid.height as i64 {
                continue;
            }
            let child: State = (nc as u32, nr as u32, d as u8);
            if closed.contains_key(&child) {
                continue;
            }
            let center = grid.cell_center(child.0, child.1);
            let yaw = (dr as f64).atan2(dc as f64);
            if !collision_free(Pose::new(center.x, center.y, yaw), grid, vehicle) {
                continue;
            }
            let step = res * ((dc * dc + dr * dr) as f64).sqrt();
            let ng = g + step;
            if best_g.get(&child).map_or(true, |&old| ng < old) {
                best_g.insert(child, ng);
                parent.insert(child, state);
                let h = center.dist(goal_center);
                seq += 1;
                heap.push(Reverse((HeapKey { f: ng + h, h, seq }, child)));
            }
        }
    }
    let Some(goal_state) = goal_state else {
        return Err(PlanError::Unreachable {
            explored: closed.len(),
        });
    };
    let mut states = alloc::vec![goal_state];
    let mut cur = goal_state;
    while let Some(&p) = parent.get(&cur) {
        states.push(p);
        cur = p;
    }
    states.reverse();
    let poses: Vec<Pose> = states
        .iter()
        .map(|&(c, r, d)| {
            let center = grid.cell_center(c, r);
            let yaw = if d == 8 {
                start.yaw
            } else {
                let (dc, dr) = DIRS[d as usize];
                (dr as f64).atan2(dc as f64)
            };
            Pose::new(center.x, center.y, yaw)
        })
        .collect();
    Ok(PlannedPath {
        poses,
        planner: String::from("astar"),
        params: alloc::vec![(String::from("resolution"), res)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p2;
    use crate::planning::{path_length, rasterize, CellState, MapBounds};

    fn corridor(defects: &[Vec<crate::math::Point2>]) -> GridMap {
        let road = alloc::vec![p2(-2.0, -6.0), p2(42.0, -6.0), p2(42.0, 6.0), p2(-2.0, 6.0)];
        rasterize(
            &[road],
            defects,
            MapBounds::new(p2(-2.0, -6.0), p2(42.0, 6.0)),
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn straight_corridor_zero_deviation() {
        let grid = corridor(&[]);
        let path = plan_astar(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(30.0, 0.0, 0.0),
            &VehicleModel::default(),
        )
        .unwrap();
        let len = path_length(&path.poses);
        let direct = path.poses[0]
            .position()
            .dist(path.poses.last().unwrap().position());
        assert!((len - direct).abs() < 1e-9, "straight path");
    }

    #[test]
    fn wall_with_gap_passes_through_gap() {
        // Wall of defects around x = 15 with a gap at y in (1, 5). The gap
        // exceeds the track width plus both wheel discs; the wall is as
        // thick as the track width, so no heading lets the rear wheels
        // straddle or step across it.
        let wall_lo = alloc::vec![p2(14.0, -6.0), p2(16.0, -6.0), p2(16.0, 1.0), p2(14.0, 1.0)];
        let wall_hi = alloc::vec![p2(14.0, 5.0), p2(16.0, 5.0), p2(16.0, 6.0), p2(14.0, 6.0)];
        let grid = corridor(&[wall_lo, wall_hi]);
        let vehicle = VehicleModel::default();
        let path = plan_astar(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(30.0, 0.0, 0.0),
            &vehicle,
        )
        .unwrap();
        // The path must cross the wall line within the gap.
        let crossing = path
            .poses
            .windows(2)
            .find(|w| (w[0].x - 15.0) * (w[1].x - 15.0) <= 0.0)
            .expect("path crosses the wall");
        assert!(crossing[0].y > 1.0 && crossing[0].y < 5.0, "{crossing:?}");
        // Replay: every pose is wheel-feasible.
        for p in &path.poses {
            assert!(collision_free(*p, &grid, &vehicle));
        }
    }

    #[test]
    fn enclosed_goal_unreachable() {
        // Ring of defects with no wheel-passable opening around the goal.
        let ring = alloc::vec![
            p2(25.0, -4.0),
            p2(35.0, -4.0),
            p2(35.0, 4.0),
            p2(25.0, 4.0),
        ];
        let hole = alloc::vec![
            p2(27.0, -2.0),
            p2(33.0, -2.0),
            p2(33.0, 2.0),
            p2(27.0, 2.0),
        ];
        // Build a frame-shaped defect: rasterize ring, then punch the hole
        // back to free so the goal itself is feasible.
        let road = alloc::vec![p2(-2.0, -6.0), p2(42.0, -6.0), p2(42.0, 6.0), p2(-2.0, 6.0)];
        let mut cells = Vec::new();
        let grid0 = rasterize(
            &[road],
            &[ring],
            MapBounds::new(p2(-2.0, -6.0), p2(42.0, 6.0)),
            0.2,
        )
        .unwrap();
        for r in 0..grid0.height {
            for c in 0..grid0.width {
                let center = grid0.cell_center(c, r);
                let mut state = grid0.state(c, r);
                if state == CellState::Defect && crate::geometry::point_in_polygon(center, &hole)
                {
                    state = CellState::Free;
                }
                cells.push(state);
            }
        }
        let grid = GridMap::new(0.2, grid0.origin, grid0.width, grid0.height, cells).unwrap();
        let err = plan_astar(
            &grid,
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(29.0, 0.0, 0.0),
            &VehicleModel::default(),
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::Unreachable { .. }), "{err:?}");
    }
}
