//! RRT* with rewiring, seeded and deterministic.

use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use super::{collision_free, CellState, GridMap, PlanError, PlannedPath, Pose, Result, VehicleModel};
use crate::math::{p2, Point2};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RrtStarConfig {
    /// Expansion (steer) distance, meters.
    pub steer: f64,
    /// Probability of sampling the goal directly.
    pub goal_bias: f64,
    /// Rewiring radius constant; derived from the free-space area when unset.
    pub gamma: Option<f64>,
    /// Cap on the rewiring radius, in multiples of `steer`.
    pub radius_cap_factor: f64,
    /// Edge collision-check spacing, meters.
    pub edge_step: f64,
}

impl Default for RrtStarConfig {
    fn default() -> Self {
        RrtStarConfig {
            steer: 1.0,
            goal_bias: 0.05,
            gamma: None,
            radius_cap_factor: 3.0,
            edge_step: 0.1,
        }
    }
}

struct Node {
    pos: Point2,
    parent: usize,
    cost: f64,
}

/// Straight-line edge check at `step` spacing with the edge's heading.
pub(super) fn edge_free(
    a: Point2,
    b: Point2,
    grid: &GridMap,
    vehicle: &VehicleModel,
    step: f64,
) -> bool {
    let d = b.sub(a);
    let len = d.norm();
    let yaw = d.y.atan2(d.x);
    let n = (len / step).ceil().max(1.0) as usize;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let p = a.add(d.scale(t));
        if !collision_free(Pose::new(p.x, p.y, yaw), grid, vehicle) {
            return false;
        }
    }
    true
}

/// Plans with RRT*: 5% goal bias, fixed steer distance, rewiring within
/// `min(gamma * sqrt(ln n / n), cap)`. Deterministic for a given seed.
pub fn plan_rrtstar(
    grid: &GridMap,
    start: Pose,
    goal: Pose,
    vehicle: &VehicleModel,
    seed: u64,
    max_iters: usize,
    config: &RrtStarConfig,
) -> Result<PlannedPath> {
    if max_iters == 0 || config.steer <= 0.0 || config.edge_step <= 0.0 {
        return Err(PlanError::InvalidConfig(String::from(
            "max_iters and distances must be positive",
        )));
    }
    if !collision_free(start, grid, vehicle) {
        return Err(PlanError::StartBlocked);
    }
    if !collision_free(goal, grid, vehicle) {
        return Err(PlanError::GoalBlocked);
    }
    if start.position().dist(goal.position()) < 1e-12 {
        return Ok(PlannedPath {
            poses: alloc::vec![start],
            planner: String::from("rrtstar"),
            params: params_of(config, 0.0),
        });
    }
    // Rewiring constant from the free-space area unless pinned.
    let free_cells = grid.cells().iter().filter(|&&c| c == CellState::Free).count();
    let free_area = free_cells as f64 * grid.resolution * grid.resolution;
    let gamma = config
        .gamma
        .unwrap_or_else(|| 2.0 * (free_area / core::f64::consts::PI).sqrt());
    let cap = config.steer * config.radius_cap_factor;

    let mut rng = crate::rng::seeded_rng(seed);
    let mut nodes = alloc::vec![Node {
        pos: start.position(),
        parent: usize::MAX,
        cost: 0.0,
    }];
    let goal_pos = goal.position();
    let (min, size) = (
        grid.origin,
        p2(
            grid.width as f64 * grid.resolution,
            grid.height as f64 * grid.resolution,
        ),
    );
    let mut best_goal: Option<(f64, usize)> = None;
    for _ in 0..max_iters {
        let sample = if rng.random::<f64>() < config.goal_bias {
            goal_pos
        } else {
            p2(
                min.x + rng.random::<f64>() * size.x,
                min.y + rng.random::<f64>() * size.y,
            )
        };
        // Nearest node (ties to the lowest index).
        let nearest = (0..nodes.len())
            .min_by(|&a, &b| {
                nodes[a]
                    .pos
                    .dist2(sample)
                    .total_cmp(&nodes[b].pos.dist2(sample))
                    .then(a.cmp(&b))
            })
            .unwrap();
        let from = nodes[nearest].pos;
        let d = sample.sub(from);
        let len = d.norm();
        if len < 1e-9 {
            continue;
        }
        let new_pos = if len <= config.steer {
            sample
        } else {
            from.add(d.scale(config.steer / len))
        };
        if !edge_free(from, new_pos, grid, vehicle, config.edge_step) {
            continue;
        }
        let n = nodes.len() as f64;
        let radius = (gamma * ((n.max(2.0)).ln() / n.max(2.0)).sqrt()).min(cap);
        // Choose the cheapest feasible parent among the neighbors.
        let mut parent = nearest;
        let mut cost = nodes[nearest].cost + from.dist(new_pos);
        let neighbors: Vec<usize> = (0..nodes.len())
            .filter(|&i| nodes[i].pos.dist(new_pos) <= radius)
            .collect();
        for &i in &neighbors {
            let c = nodes[i].cost + nodes[i].pos.dist(new_pos);
            if c < cost && edge_free(nodes[i].pos, new_pos, grid, vehicle, config.edge_step) {
                parent = i;
                cost = c;
            }
        }
        let new_index = nodes.len();
        nodes.push(Node {
            pos: new_pos,
            parent,
            cost,
        });
        // Rewire neighbors through the new node when cheaper.
        for &i in &neighbors {
            let through = cost + new_pos.dist(nodes[i].pos);
            if through + 1e-12 < nodes[i].cost
                && edge_free(new_pos, nodes[i].pos, grid, vehicle, config.edge_step)
            {
                nodes[i].parent = new_index;
                let delta = nodes[i].cost - through;
                nodes[i].cost -= delta;
                propagate_cost(&mut nodes, i, delta);
            }
        }
        // Goal connection.
        let goal_dist = new_pos.dist(goal_pos);
        if goal_dist <= config.steer
            && edge_free(new_pos, goal_pos, grid, vehicle, config.edge_step)
        {
            let total = cost + goal_dist;
            if best_goal.map_or(true, |(c, _)| total < c) {
                best_goal = Some((total, new_index));
            }
        }
    }
    let Some((total_cost, last)) = best_goal else {
        return Err(PlanError::IterationsExhausted {
            iterations: max_iters,
            tree_size: nodes.len(),
        });
    };
    let mut chain = alloc::vec![goal_pos];
    let mut cur = last;
    while cur != usize::MAX {
        chain.push(nodes[cur].pos);
        cur = nodes[cur].parent;
    }
    chain.reverse();
    let mut poses = Vec::with_capacity(chain.len());
    for (i, &p) in chain.iter().enumerate() {
        let yaw = if i + 1 < chain.len() {
            let d = chain[i + 1].sub(p);
            d.y.atan2(d.x)
        } else {
            let d = p.sub(chain[i - 1]);
            d.y.atan2(d.x)
        };
        poses.push(Pose::new(p.x, p.y, yaw));
    }
    Ok(PlannedPath {
        poses,
        planner: String::from("rrtstar"),
        params: params_of(config, total_cost),
    })
}

/// Recomputes descendant costs after a rewire.
fn propagate_cost(nodes: &mut [Node], root: usize, delta: f64) {
    // Children are sparse; a linear pass per rewire keeps this simple.
    let mut stack = alloc::vec![root];
    while let Some(i) = stack.pop() {
        for j in 0..nodes.len() {
            if nodes[j].parent == i {
                nodes[j].cost -= delta;
                stack.push(j);
            }
        }
    }
}

fn params_of(config: &RrtStarConfig, cost: f64) -> Vec<(String, f64)> {
    alloc::vec![
        (String::from("steer"), config.steer),
        (String::from("goal_bias"), config.goal_bias),
        (String::from("cost"), cost),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::{path_length, rasterize, MapBounds};

    fn corridor() -> GridMap {
        let road = alloc::vec![
            p2(-2.0, -4.0),
            p2(32.0, -4.0),
            p2(32.0, 4.0),
            p2(-2.0, 4.0)
        ];
        rasterize(
            &[road],
            &[],
            MapBounds::new(p2(-2.0, -4.0), p2(32.0, 4.0)),
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn empty_corridor_close_to_straight() {
        let grid = corridor();
        let start = Pose::new(0.0, 0.0, 0.0);
        let goal = Pose::new(25.0, 0.0, 0.0);
        let path = plan_rrtstar(
            &grid,
            start,
            goal,
            &VehicleModel::default(),
            1234,
            5000,
            &RrtStarConfig::default(),
        )
        .unwrap();
        let len = path_length(&path.poses);
        let straight = start.position().dist(goal.position());
        assert!(
            len <= straight * 1.05,
            "within 5% of straight: {len} vs {straight}"
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let grid = corridor();
        let start = Pose::new(0.0, 0.0, 0.0);
        let goal = Pose::new(20.0, 1.0, 0.0);
        let run = || {
            plan_rrtstar(
                &grid,
                start,
                goal,
                &VehicleModel::default(),
                9,
                800,
                &RrtStarConfig::default(),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.poses, b.poses);
    }

    #[test]
    fn start_equals_goal_single_pose() {
        let grid = corridor();
        let pose = Pose::new(5.0, 0.0, 0.3);
        let path = plan_rrtstar(
            &grid,
            pose,
            pose,
            &VehicleModel::default(),
            1,
            10,
            &RrtStarConfig::default(),
        )
        .unwrap();
        assert_eq!(path.poses.len(), 1);
    }
}
