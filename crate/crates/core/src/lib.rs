//! Reactive human-to-robot handover: temporally consistent grasp refinement,
//! hand-aware pruning, cost-based grasp selection, a four-action reactive task
//! model, and a deterministic fixed-rate simulator that ties them together.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, traces on disk and
//! the command line live in the `handover` crate.

#![no_std]
// `!(x > 0.0)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod evaluator;
pub mod geometry;
mod math;
pub mod motion;
pub mod planner;
pub mod refinement;
pub mod rng;
pub mod scene;
pub mod selection;
pub mod sim;

pub use evaluator::{AntipodalEvaluator, Grasp, GraspEvaluator, GripperModel};
pub use geometry::{flip_about_grasp_z, offset_along_grasp_z, pose_distance, Pose, Quat, Vec3};
pub use planner::{decide, TaskStage, WorldPredicates};
pub use refinement::{GraspSet, PerturbationConfig};
pub use rng::SimRng;
pub use scene::{Label, LabeledPointCloud, PrimitiveShape};
pub use selection::{SelectedTarget, SelectionConfig};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape dimensions must be positive")]
    InvalidShape,
    #[error("hand model needs at least one sphere with positive radius")]
    InvalidHand,
    #[error("point density must be positive")]
    InvalidDensity,
    #[error("probability must lie in [0, 1]")]
    InvalidProbability,
    #[error("invalid {0} configuration")]
    InvalidConfig(&'static str),
    #[error("hand trajectory keyframe times must be strictly increasing")]
    KeyframesNotIncreasing,
    #[error("hand trajectory needs at least one keyframe")]
    EmptyTrajectory,
    #[error("time limit must be positive")]
    InvalidTimeLimit,
}
