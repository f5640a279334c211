use alloc::string::String;
use alloc::vec::Vec;

use crate::evaluator::GripperModel;
use crate::geometry::{Pose, Vec3};
use crate::planner::TaskStage;
use crate::selection::SelectedTarget;

use super::scenario::Mode;

/// First line of a trace: what the audit needs to re-check the records.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceHeader {
    pub scenario: String,
    pub seed: u64,
    pub mode: Mode,
    pub dt: f64,
    pub v_max: f64,
    pub w_max: f64,
    pub hand_margin: f64,
    pub w_q: f64,
    pub gripper: GripperModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PlanKind {
    Straight,
    Rrt,
    Blocked,
}

/// One record per base tick.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceRecord {
    pub tick: u64,
    pub sim_time: f64,
    pub stage: TaskStage,
    pub ee_pose: Pose,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub selected_target: Option<SelectedTarget>,
    pub candidate_count: usize,
    pub resampled: bool,
    pub attempt_count: u32,
    /// Hand points from a segmentation update on this tick.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub hand_cloud: Option<Vec<Vec3>>,
    /// Scenario events that fired on this tick.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub events: Vec<String>,
    /// Set on ticks where the motion was (re)planned.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub plan: Option<PlanKind>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub waypoints: Option<Vec<Vec3>>,
}

/// Target change between consecutive planning ticks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub tick: u64,
    /// Pose distance between this tick's approach pose and the previous one.
    pub distance: f64,
    /// Whether the grasp set was refreshed since the previous planning tick.
    pub fresh_grasps: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    pub success: bool,
    /// Simulated seconds until the object was dropped off, or until the run
    /// stopped when unsuccessful.
    pub time_to_success: f64,
    pub attempts: u32,
    pub displacements: Vec<Displacement>,
    /// Refinement ticks after the first that sampled new grasps.
    pub resamples_after_bootstrap: usize,
    pub refinement_ticks: usize,
    pub rrt_plans: usize,
    pub blocked_plans: usize,
}

impl Metrics {
    /// Displacements observed right after the grasp set changed.
    pub fn fresh_displacements(&self) -> impl Iterator<Item = f64> + '_ {
        self.displacements.iter().filter(|d| d.fresh_grasps).map(|d| d.distance)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub metrics: Metrics,
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}
