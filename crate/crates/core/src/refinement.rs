//! Frame-to-frame grasp maintenance.
//!
//! Each grasp from the previous frame proposes a translated copy of itself
//! (orientation untouched) and moves there with probability
//! `min(f(g') / f(g), 1)`. Grasps that touch the hand are removed, and when
//! too few survive the set is topped up from the sampler.

use alloc::vec::Vec;

use crate::evaluator::{sample_grasps, Grasp, GraspEvaluator, GripperModel};
use crate::geometry::{Pose, Vec3};
use crate::rng::{stream, SimRng};
use crate::scene::LabeledPointCloud;
use crate::Error;

/// Default dilation of the gripper boxes when testing against the hand.
pub const DEFAULT_HAND_MARGIN: f64 = 0.005;

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraspSet {
    pub grasps: Vec<Grasp>,
    pub frame_index: u64,
}

impl GraspSet {
    pub fn new(grasps: Vec<Grasp>, frame_index: u64) -> Self {
        Self { grasps, frame_index }
    }

    pub fn len(&self) -> usize {
        self.grasps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grasps.is_empty()
    }

    pub fn mean_score(&self) -> Option<f64> {
        if self.is_empty() {
            None
        } else {
            Some(self.grasps.iter().map(|g| g.score).sum::<f64>() / self.len() as f64)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PerturbationConfig {
    /// Half-width of the per-axis uniform translation, meters.
    pub delta_t_range: f64,
    /// Scores below this count as zero in the acceptance ratio.
    pub epsilon_den: f64,
    pub resample_threshold: usize,
    pub target_size: usize,
    pub hand_margin: f64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            delta_t_range: 0.02,
            epsilon_den: 1e-6,
            resample_threshold: 10,
            target_size: 50,
            hand_margin: DEFAULT_HAND_MARGIN,
        }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.delta_t_range >= 0.0)
            || !(self.epsilon_den > 0.0)
            || self.resample_threshold == 0
            || self.resample_threshold >= self.target_size
            || !(self.hand_margin >= 0.0)
        {
            return Err(Error::InvalidConfig("perturbation"));
        }
        Ok(())
    }
}

/// Translates the grasp by an independent uniform draw in
/// `[-delta_t_range, delta_t_range]` on each world axis.
pub fn perturb(g: &Grasp, cfg: &PerturbationConfig, rng: &mut SimRng) -> Pose {
    let r = cfg.delta_t_range;
    let dx = rng.uniform(-r, r);
    let dy = rng.uniform(-r, r);
    let dz = rng.uniform(-r, r);
    Pose::new(g.pose.p + Vec3::new(dx, dy, dz), g.pose.q)
}

/// Acceptance probability for moving from a grasp scored `old` to one scored
/// `new`. A zero-quality current grasp always moves to a non-zero proposal.
pub fn acceptance_probability(old: f64, new: f64, epsilon_den: f64) -> f64 {
    if old < epsilon_den {
        if new >= epsilon_den {
            1.0
        } else {
            0.0
        }
    } else {
        (new / old).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub proposed: usize,
    pub accepted: usize,
}

/// One refinement sweep. Every grasp draws from its own stream keyed by
/// `(seed, frame_index, grasp index)`, so the result does not depend on the
/// order grasps are visited in.
///
/// Accepted grasps take the proposal's pose and score; rejected ones keep
/// their pose and are re-scored against `object`.
pub fn mh_step<E: GraspEvaluator>(
    prev: &GraspSet,
    object: &LabeledPointCloud,
    evaluator: &E,
    cfg: &PerturbationConfig,
    seed: u64,
) -> (GraspSet, StepStats) {
    let mut stats = StepStats::default();
    let grasps = prev
        .grasps
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = SimRng::derive(seed, &[stream::REFINE, prev.frame_index, i as u64]);
            let proposal = perturb(g, cfg, &mut rng);
            let new_score = evaluator.evaluate(&proposal, object);
            let old_score = evaluator.evaluate(&g.pose, object);
            let r = acceptance_probability(old_score, new_score, cfg.epsilon_den);
            stats.proposed += 1;
            if rng.unit() < r {
                stats.accepted += 1;
                Grasp::new(proposal, new_score)
            } else {
                Grasp::new(g.pose, old_score)
            }
        })
        .collect();
    (GraspSet::new(grasps, prev.frame_index + 1), stats)
}

/// Drops every grasp whose gripper boxes, dilated by `margin`, contain a hand
/// point.
pub fn prune_hand_collisions(set: &GraspSet, hand: &[Vec3], gripper: &GripperModel, margin: f64) -> GraspSet {
    if hand.is_empty() {
        return set.clone();
    }
    let grasps = set
        .grasps
        .iter()
        .filter(|g| !gripper.collides(&g.pose, hand, margin))
        .copied()
        .collect();
    GraspSet::new(grasps, set.frame_index)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaintainOutcome {
    pub set: GraspSet,
    pub resampled: bool,
    pub accepted: usize,
    /// Grasps removed for hand contact or zero quality.
    pub removed: usize,
}

/// Refine, drop dead and hand-colliding grasps, and top up from the sampler
/// when fewer than `resample_threshold` remain (or there was nothing to
/// refine). An empty result means the object currently offers no grasp.
pub fn maintain<E: GraspEvaluator>(
    prev: &GraspSet,
    object: &LabeledPointCloud,
    hand: &[Vec3],
    evaluator: &E,
    gripper: &GripperModel,
    cfg: &PerturbationConfig,
    seed: u64,
) -> MaintainOutcome {
    let frame = prev.frame_index + 1;
    if object.is_empty() {
        return MaintainOutcome {
            set: GraspSet::new(Vec::new(), frame),
            removed: prev.len(),
            ..MaintainOutcome::default()
        };
    }
    let (mut set, stats) = if prev.is_empty() {
        (GraspSet::new(Vec::new(), frame), StepStats::default())
    } else {
        mh_step(prev, object, evaluator, cfg, seed)
    };
    let before = set.len();
    set.grasps.retain(|g| g.score >= cfg.epsilon_den);
    set = prune_hand_collisions(&set, hand, gripper, cfg.hand_margin);
    let removed = before - set.len();

    let mut resampled = false;
    if prev.is_empty() || set.len() < cfg.resample_threshold {
        resampled = true;
        let want = cfg.target_size.saturating_sub(set.len());
        let mut rng = SimRng::derive(seed, &[stream::SAMPLE, frame]);
        let fresh = GraspSet::new(sample_grasps(object, want, evaluator, &mut rng), frame);
        let fresh = prune_hand_collisions(&fresh, hand, gripper, cfg.hand_margin);
        set.grasps.extend(fresh.grasps);
    }
    MaintainOutcome {
        set,
        resampled,
        accepted: stats.accepted,
        removed,
    }
}
