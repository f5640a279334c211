//! End-effector motion: straight segments when they are clear, RRT-Connect in
//! position space when they are not, and a velocity-limited servo that
//! follows the result.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Pose, Vec3};
use crate::rng::SimRng;
use crate::selection::point_segment_distance;
use crate::Error;

pub const DEFAULT_CLEARANCE: f64 = 0.03;
pub const DEFAULT_RRT_ITERS: usize = 2000;
pub const DEFAULT_RRT_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MotionConfig {
    /// Linear speed limit, m/s.
    pub v_max: f64,
    /// Angular speed limit, rad/s.
    pub w_max: f64,
    pub clearance: f64,
    pub rrt_max_iters: usize,
    pub rrt_step: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            v_max: 0.25,
            w_max: 1.0,
            clearance: DEFAULT_CLEARANCE,
            rrt_max_iters: DEFAULT_RRT_ITERS,
            rrt_step: DEFAULT_RRT_STEP,
        }
    }
}

impl MotionConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.v_max > 0.0) || !(self.w_max > 0.0) || !(self.clearance > 0.0) || !(self.rrt_step > 0.0) {
            return Err(Error::InvalidConfig("motion"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndEffectorState {
    pub pose: Pose,
    pub v_max: f64,
    pub w_max: f64,
}

impl EndEffectorState {
    pub fn new(pose: Pose, cfg: &MotionConfig) -> Self {
        Self { pose, v_max: cfg.v_max, w_max: cfg.w_max }
    }
}

/// Axis-aligned sampling volume for the planner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

#[derive(Clone, Debug)]
pub struct PathQuery<'a> {
    pub start: Vec3,
    pub goal: Vec3,
    pub colliders: &'a [Vec3],
    pub table_z: f64,
    pub clearance: f64,
    /// Sampling volume; defaults to the start/goal box grown by 0.5 m.
    pub bounds: Option<Bounds>,
}

impl<'a> PathQuery<'a> {
    pub fn new(start: Vec3, goal: Vec3, colliders: &'a [Vec3], table_z: f64, clearance: f64) -> Self {
        Self { start, goal, colliders, table_z, clearance, bounds: None }
    }

    fn sampling_bounds(&self) -> Bounds {
        self.bounds.unwrap_or_else(|| {
            let m = 0.5;
            let lo = Vec3::new(self.start.x.min(self.goal.x), self.start.y.min(self.goal.y), self.start.z.min(self.goal.z));
            let hi = Vec3::new(self.start.x.max(self.goal.x), self.start.y.max(self.goal.y), self.start.z.max(self.goal.z));
            Bounds {
                min: Vec3::new(lo.x - m, lo.y - m, (lo.z - m).max(self.table_z + self.clearance)),
                max: Vec3::new(hi.x + m, hi.y + m, hi.z + m),
            }
        })
    }

    pub fn point_free(&self, p: Vec3) -> bool {
        p.z - self.table_z >= self.clearance && self.colliders.iter().all(|&c| c.distance(p) >= self.clearance)
    }

    fn segment_free(&self, a: Vec3, b: Vec3) -> bool {
        a.z - self.table_z >= self.clearance
            && b.z - self.table_z >= self.clearance
            && self.colliders.iter().all(|&c| point_segment_distance(c, a, b) >= self.clearance)
    }
}

/// True iff every collider is at least `clearance` from the segment and both
/// ends (hence the whole segment) are `clearance` above the table.
pub fn segment_collision_free(q: &PathQuery<'_>) -> bool {
    q.segment_free(q.start, q.goal)
}

struct Node {
    p: Vec3,
    parent: Option<usize>,
}

enum Extend {
    Trapped,
    Advanced(usize),
    Reached(usize),
}

fn nearest(tree: &[Node], p: Vec3) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, n) in tree.iter().enumerate() {
        let d = n.p.distance_squared(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn extend(tree: &mut Vec<Node>, target: Vec3, step: f64, q: &PathQuery<'_>) -> Extend {
    let near = nearest(tree, target);
    let from = tree[near].p;
    let dist = from.distance(target);
    let (new, reached) = if dist <= step { (target, true) } else { (from + (target - from) * (step / dist), false) };
    if !q.segment_free(from, new) {
        return Extend::Trapped;
    }
    tree.push(Node { p: new, parent: Some(near) });
    let idx = tree.len() - 1;
    if reached {
        Extend::Reached(idx)
    } else {
        Extend::Advanced(idx)
    }
}

fn branch(tree: &[Node], mut idx: usize) -> Vec<Vec3> {
    let mut out = vec![tree[idx].p];
    while let Some(parent) = tree[idx].parent {
        idx = parent;
        out.push(tree[idx].p);
    }
    out
}

/// Bidirectional RRT-Connect over end-effector positions. Returns a polyline
/// from `start` to `goal` whose every segment passes the collision check, or
/// `None` when the endpoints are blocked or `max_iters` runs out.
pub fn rrt_connect(q: &PathQuery<'_>, rng: &mut SimRng, max_iters: usize, step: f64) -> Option<Vec<Vec3>> {
    if !q.point_free(q.start) || !q.point_free(q.goal) {
        return None;
    }
    if q.segment_free(q.start, q.goal) {
        return Some(vec![q.start, q.goal]);
    }
    let bounds = q.sampling_bounds();
    let mut start_tree = vec![Node { p: q.start, parent: None }];
    let mut goal_tree = vec![Node { p: q.goal, parent: None }];
    let mut from_start = true;
    for _ in 0..max_iters {
        let sample = Vec3::new(
            rng.uniform(bounds.min.x, bounds.max.x),
            rng.uniform(bounds.min.y, bounds.max.y),
            rng.uniform(bounds.min.z, bounds.max.z),
        );
        let (a, b) = if from_start { (&mut start_tree, &mut goal_tree) } else { (&mut goal_tree, &mut start_tree) };
        let new_idx = match extend(a, sample, step, q) {
            Extend::Trapped => {
                from_start = !from_start;
                continue;
            }
            Extend::Advanced(i) | Extend::Reached(i) => i,
        };
        let target = a[new_idx].p;
        loop {
            match extend(b, target, step, q) {
                Extend::Advanced(_) => continue,
                Extend::Trapped => break,
                Extend::Reached(j) => {
                    let (si, gi, st, gt) = if from_start {
                        (new_idx, j, &start_tree, &goal_tree)
                    } else {
                        (j, new_idx, &start_tree, &goal_tree)
                    };
                    let mut path = branch(st, si);
                    path.reverse();
                    // The connecting node duplicates the other tree's leaf.
                    let tail = branch(gt, gi);
                    path.extend(tail.into_iter().skip(1));
                    return Some(path);
                }
            }
        }
        from_start = !from_start;
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum MotionPlan {
    /// The direct segment is clear.
    Straight,
    /// Waypoints after the start position, ending at the goal.
    Waypoints(Vec<Vec3>),
    /// Neither a straight segment nor a sampled path was found.
    Blocked,
}

/// Straight line first; RRT-Connect only when the straight segment is
/// blocked.
pub fn plan_path(q: &PathQuery<'_>, rng: &mut SimRng, max_iters: usize, step: f64) -> MotionPlan {
    if segment_collision_free(q) {
        return MotionPlan::Straight;
    }
    match rrt_connect(q, rng, max_iters, step) {
        Some(path) => MotionPlan::Waypoints(path.into_iter().skip(1).collect()),
        None => MotionPlan::Blocked,
    }
}

/// Relative slack for landing exactly on the target, so rounding in earlier
/// steps cannot cost an extra tick.
const SNAP: f64 = 1.0 + 1e-9;

/// One control tick toward `target`: translation clipped to `v_max·dt`,
/// shortest-arc rotation clipped to `w_max·dt`.
pub fn servo_step(state: &EndEffectorState, target: &Pose, dt: f64) -> EndEffectorState {
    let max_move = state.v_max * dt;
    let delta = target.p - state.pose.p;
    let dist = delta.norm();
    let p = if dist <= max_move * SNAP { target.p } else { state.pose.p + delta * (max_move / dist) };

    let max_turn = state.w_max * dt;
    let angle = state.pose.q.angle_to(target.q);
    let q = if angle <= max_turn * SNAP { target.q } else { state.pose.q.slerp(target.q, max_turn / angle) };

    EndEffectorState { pose: Pose::new(p, q), ..*state }
}
