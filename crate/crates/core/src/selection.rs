//! Choosing which grasp to pursue on a planning tick.
//!
//! Candidates (each grasp and its upside-down twin) are ranked by a cost that
//! penalizes low scores and distance from both the previous target and the
//! home pose. The cheapest candidate that is reachable and whose approach and
//! push-in motions clear the hand and table wins.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::evaluator::{Grasp, GripperModel, LocalFrame};
use crate::geometry::{flip_about_grasp_z, offset_along_grasp_z, pose_distance, Pose, Vec3};
use crate::math;
use crate::refinement::GraspSet;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SelectionConfig {
    pub w_s: f64,
    pub w_prev: f64,
    pub w_home: f64,
    pub w_q: f64,
    /// Minimum acceptable grasp score.
    pub s_min: f64,
    /// Distance behind the grasp along -Z where the robot waits, meters.
    pub standoff: f64,
    /// Forward travel past the grasp before closing, meters.
    pub push_in: f64,
    /// Dilation of the gripper swept volume for feasibility checks, meters.
    pub sweep_margin: f64,
    /// Maximum translation between consecutive swept-volume samples, meters.
    pub sweep_step: f64,
    /// Maximum rotation between consecutive swept-volume samples, radians.
    pub sweep_angle_step: f64,
    /// Point-in-box tests allowed per candidate before it is skipped.
    pub feasibility_budget: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            w_s: 1.0,
            w_prev: 5.0,
            w_home: 5.0,
            w_q: 0.1,
            s_min: 0.5,
            standoff: 0.10,
            push_in: 0.05,
            sweep_margin: 0.005,
            sweep_step: 0.01,
            sweep_angle_step: 0.1,
            feasibility_budget: 400_000,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let weights_ok = [self.w_s, self.w_prev, self.w_home, self.w_q].iter().all(|&w| w >= 0.0);
        if !weights_ok
            || !(self.s_min > 0.0 && self.s_min < 1.0)
            || !(self.standoff >= 0.0)
            || !(self.push_in >= 0.0)
            || !(self.sweep_margin >= 0.0)
            || !(self.sweep_step > 0.0)
            || !(self.sweep_angle_step > 0.0)
        {
            return Err(Error::InvalidConfig("selection"));
        }
        Ok(())
    }
}

/// Spherical shell about the robot base, above a floor height.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ReachableRegion {
    pub base: Vec3,
    pub r_min: f64,
    pub r_max: f64,
    pub z_min: f64,
}

impl Default for ReachableRegion {
    fn default() -> Self {
        Self { base: Vec3::ZERO, r_min: 0.25, r_max: 0.85, z_min: 0.02 }
    }
}

impl ReachableRegion {
    pub fn contains(&self, p: Vec3) -> bool {
        let r = p.distance(self.base);
        r >= self.r_min && r <= self.r_max && p.z > self.z_min
    }
}

/// What the gripper must avoid while approaching: hand points and the table.
#[derive(Clone, Copy, Debug)]
pub struct Colliders<'a> {
    pub points: &'a [Vec3],
    pub table_z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectedTarget {
    pub grasp: Grasp,
    pub approach_pose: Pose,
    pub final_pose: Pose,
    pub cost: f64,
}

impl SelectedTarget {
    pub fn from_grasp(grasp: Grasp, cost: f64, cfg: &SelectionConfig) -> Self {
        Self {
            grasp,
            approach_pose: offset_along_grasp_z(&grasp.pose, -cfg.standoff),
            final_pose: offset_along_grasp_z(&grasp.pose, cfg.push_in),
            cost,
        }
    }
}

/// Each grasp followed (after all originals) by its half-turn twin with the
/// same score.
pub fn expand_flips(set: &GraspSet) -> GraspSet {
    let mut grasps = Vec::with_capacity(2 * set.len());
    grasps.extend(set.grasps.iter().copied());
    grasps.extend(set.grasps.iter().map(|g| Grasp { pose: flip_about_grasp_z(&g.pose), score: g.score }));
    GraspSet::new(grasps, set.frame_index)
}

/// Cost to minimize:
/// `w_s·max(s_min − s, 0) + w_prev·d(x_appr, x_prev) + w_home·d(x_appr, x_home)`.
pub fn grasp_cost(x_appr: &Pose, score: f64, x_prev: &Pose, x_home: &Pose, cfg: &SelectionConfig) -> f64 {
    cfg.w_s * (cfg.s_min - score).max(0.0)
        + cfg.w_prev * pose_distance(x_appr, x_prev, cfg.w_q)
        + cfg.w_home * pose_distance(x_appr, x_home, cfg.w_q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    Unreachable,
    /// The grasp pose itself touches a hand point.
    HandContact,
    ApproachBlocked,
    PushInBlocked,
    OverBudget,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionOutcome {
    pub target: Option<SelectedTarget>,
    /// Candidates after flip expansion.
    pub candidate_count: usize,
    /// Candidates checked for feasibility, including the winner.
    pub examined: usize,
}

/// Ranks the flip-expanded candidates by ascending cost (ties: higher score,
/// then original order) and returns the first feasible one.
#[allow(clippy::too_many_arguments)]
pub fn select_target(
    set: &GraspSet,
    current: &Pose,
    x_prev: &Pose,
    x_home: &Pose,
    colliders: &Colliders<'_>,
    region: &ReachableRegion,
    gripper: &GripperModel,
    cfg: &SelectionConfig,
) -> SelectionOutcome {
    let expanded = expand_flips(set);
    let mut ranked: Vec<(usize, SelectedTarget)> = expanded
        .grasps
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut t = SelectedTarget::from_grasp(*g, 0.0, cfg);
            t.cost = grasp_cost(&t.approach_pose, g.score, x_prev, x_home, cfg);
            (i, t)
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.1.cost
            .partial_cmp(&b.1.cost)
            .unwrap_or(Ordering::Equal)
            .then(b.1.grasp.score.partial_cmp(&a.1.grasp.score).unwrap_or(Ordering::Equal))
            .then(a.0.cmp(&b.0))
    });

    let mut outcome = SelectionOutcome { candidate_count: ranked.len(), ..Default::default() };
    for (_, t) in ranked {
        outcome.examined += 1;
        if check_candidate(&t, current, colliders, region, gripper, cfg).is_ok() {
            outcome.target = Some(t);
            break;
        }
    }
    outcome
}

/// Reachability, then hand contact at the grasp itself, then the two swept
/// segments.
pub fn check_candidate(
    t: &SelectedTarget,
    current: &Pose,
    colliders: &Colliders<'_>,
    region: &ReachableRegion,
    gripper: &GripperModel,
    cfg: &SelectionConfig,
) -> Result<(), Rejection> {
    if !region.contains(t.approach_pose.p) || !region.contains(t.final_pose.p) {
        return Err(Rejection::Unreachable);
    }
    if gripper.collides(&t.grasp.pose, colliders.points, cfg.sweep_margin) {
        return Err(Rejection::HandContact);
    }
    let mut budget = cfg.feasibility_budget;
    match sweep_is_clear(current, &t.approach_pose, colliders, gripper, cfg, &mut budget) {
        Some(true) => {}
        Some(false) => return Err(Rejection::ApproachBlocked),
        None => return Err(Rejection::OverBudget),
    }
    match sweep_is_clear(&t.approach_pose, &t.final_pose, colliders, gripper, cfg, &mut budget) {
        Some(true) => Ok(()),
        Some(false) => Err(Rejection::PushInBlocked),
        None => Err(Rejection::OverBudget),
    }
}

/// Samples the straight motion `from → to` (linear position, slerped
/// orientation) finely enough that no dilated box can skip over a point, and
/// tests every sample against the colliders. `None` when the budget of
/// point-in-box tests runs out.
pub fn sweep_is_clear(
    from: &Pose,
    to: &Pose,
    colliders: &Colliders<'_>,
    gripper: &GripperModel,
    cfg: &SelectionConfig,
    budget: &mut usize,
) -> Option<bool> {
    let boxes = gripper.collision_boxes().map(|b| b.dilated(cfg.sweep_margin));
    let radius = gripper.bounding_radius(cfg.sweep_margin);
    let travel = from.p.distance(to.p);
    let turn = from.q.angle_to(to.q);
    // Rotation moves box corners by at most radius·angle.
    let steps = math::ceil((travel / cfg.sweep_step).max(turn * radius / cfg.sweep_step).max(turn / cfg.sweep_angle_step))
        .max(1.0) as usize;

    let nearby: Vec<Vec3> = colliders
        .points
        .iter()
        .copied()
        .filter(|&p| point_segment_distance(p, from.p, to.p) <= radius)
        .collect();
    let r2 = radius * radius;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let pose = Pose::new(from.p.lerp(to.p, t), from.q.slerp(to.q, t));
        for b in &boxes {
            for c in b.corners() {
                if pose.transform_point(c).z < colliders.table_z {
                    return Some(false);
                }
            }
        }
        let frame = LocalFrame::new(&pose);
        for &p in &nearby {
            if p.distance_squared(pose.p) > r2 {
                continue;
            }
            if *budget < boxes.len() {
                return None;
            }
            *budget -= boxes.len();
            let l = frame.to_local(p);
            if boxes.iter().any(|b| b.contains(l)) {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Euclidean distance from `p` to the segment `a–b`.
pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.distance(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Quat;
    use alloc::vec;

    fn horizontal(p: Vec3) -> Pose {
        // Approach along world +X.
        Pose::new(p, Quat::from_axis_angle(Vec3::Y, core::f64::consts::FRAC_PI_2))
    }

    #[test]
    fn cost_examples() {
        let cfg = SelectionConfig::default();
        let x = horizontal(Vec3::new(0.5, 0.0, 0.3));
        assert_eq!(grasp_cost(&x, 0.9, &x, &x, &cfg), 0.0);
        assert!((grasp_cost(&x, 0.3, &x, &x, &cfg) - 0.2).abs() < 1e-12);
        let prev = Pose::new(x.p + Vec3::new(0.1, 0.0, 0.0), x.q);
        let home = Pose::new(x.p + Vec3::new(0.0, 0.2, 0.0), x.q);
        assert!((grasp_cost(&x, 0.6, &prev, &home, &cfg) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn expansion_doubles() {
        assert_eq!(expand_flips(&GraspSet::default()).len(), 0);
        let set = GraspSet::new(vec![Grasp::new(horizontal(Vec3::X), 0.4); 50], 1);
        let out = expand_flips(&set);
        assert_eq!(out.len(), 100);
        for (a, b) in set.grasps.iter().zip(&out.grasps[50..]) {
            assert_eq!(a.pose.p, b.pose.p);
            assert_eq!(a.score, b.score);
            assert!(a.pose.axis_z().distance(b.pose.axis_z()) < 1e-12);
        }
    }

    #[test]
    fn region_shell() {
        let r = ReachableRegion::default();
        assert!(r.contains(Vec3::new(0.5, 0.0, 0.3)));
        assert!(!r.contains(Vec3::new(0.1, 0.0, 0.1)));
        assert!(!r.contains(Vec3::new(0.9, 0.0, 0.1)));
        assert!(!r.contains(Vec3::new(0.5, 0.0, 0.01)));
    }

    #[test]
    fn point_segment() {
        let a = Vec3::ZERO;
        let b = Vec3::X;
        assert!((point_segment_distance(Vec3::new(0.5, 0.2, 0.0), a, b) - 0.2).abs() < 1e-15);
        assert!((point_segment_distance(Vec3::new(-0.3, 0.4, 0.0), a, b) - 0.5).abs() < 1e-15);
        assert!((point_segment_distance(Vec3::new(0.3, 0.4, 0.0), a, a) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sweep_detects_hand_on_path() {
        let cfg = SelectionConfig::default();
        let g = GripperModel::default();
        let from = horizontal(Vec3::new(0.3, 0.0, 0.3));
        let to = horizontal(Vec3::new(0.6, 0.0, 0.3));
        let hand = [Vec3::new(0.45, 0.045, 0.3)];
        let c = Colliders { points: &hand, table_z: 0.0 };
        let mut budget = usize::MAX;
        assert_eq!(sweep_is_clear(&from, &to, &c, &g, &cfg, &mut budget), Some(false));
        let off = [Vec3::new(0.45, 0.2, 0.3)];
        let c = Colliders { points: &off, table_z: 0.0 };
        assert_eq!(sweep_is_clear(&from, &to, &c, &g, &cfg, &mut budget), Some(true));
        let mut tiny = 1;
        let c = Colliders { points: &hand, table_z: 0.0 };
        assert_eq!(sweep_is_clear(&from, &to, &c, &g, &cfg, &mut tiny), None);
    }

    #[test]
    fn sweep_respects_table() {
        let cfg = SelectionConfig::default();
        let g = GripperModel::default();
        let from = horizontal(Vec3::new(0.3, 0.0, 0.3));
        let to = horizontal(Vec3::new(0.5, 0.0, 0.03));
        let c = Colliders { points: &[], table_z: 0.0 };
        let mut budget = usize::MAX;
        assert_eq!(sweep_is_clear(&from, &to, &c, &g, &cfg, &mut budget), Some(false));
    }

    #[test]
    fn single_feasible_candidate_wins_regardless_of_cost() {
        let cfg = SelectionConfig::default();
        let home = horizontal(Vec3::new(0.35, 0.0, 0.4));
        let g = Grasp::new(horizontal(Vec3::new(0.7, 0.3, 0.25)), 0.1);
        let set = GraspSet::new(vec![g], 0);
        let c = Colliders { points: &[], table_z: 0.0 };
        let out = select_target(&set, &home, &home, &home, &c, &ReachableRegion::default(), &GripperModel::default(), &cfg);
        let t = out.target.unwrap();
        assert_eq!(t.grasp, g);
        assert_eq!(out.candidate_count, 2);
        assert_eq!(t.approach_pose, offset_along_grasp_z(&g.pose, -0.10));
        assert_eq!(t.final_pose, offset_along_grasp_z(&g.pose, 0.05));
    }

    #[test]
    fn prefers_previous_target_on_ties() {
        let cfg = SelectionConfig::default();
        let home = horizontal(Vec3::new(0.35, 0.0, 0.4));
        let a = Grasp::new(horizontal(Vec3::new(0.6, 0.05, 0.3)), 0.6);
        let b = Grasp::new(horizontal(Vec3::new(0.6, -0.05, 0.3)), 0.6);
        let prev = SelectedTarget::from_grasp(b, 0.0, &cfg).approach_pose;
        let set = GraspSet::new(vec![a, b], 0);
        let c = Colliders { points: &[], table_z: 0.0 };
        let out = select_target(&set, &home, &prev, &home, &c, &ReachableRegion::default(), &GripperModel::default(), &cfg);
        assert_eq!(out.target.unwrap().grasp.pose.p, b.pose.p);
    }

    #[test]
    fn config_validation() {
        assert!(SelectionConfig::default().validate().is_ok());
        assert!(SelectionConfig { s_min: 1.0, ..Default::default() }.validate().is_err());
        assert!(SelectionConfig { w_prev: -1.0, ..Default::default() }.validate().is_err());
    }
}
