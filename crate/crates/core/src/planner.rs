//! Reactive task model: four actions checked from last to first every tick.

use crate::evaluator::GripperModel;
use crate::geometry::{pose_distance, Pose, Vec3};
use crate::selection::SelectedTarget;

/// Palm height above the table plane at which the human counts as offering.
pub const HAND_ABOVE_TABLE: f64 = 0.10;

/// Arrival tolerance at the standoff pose, in pose-distance units.
pub const AT_STANDOFF_TOLERANCE: f64 = 0.0005;

/// Object points required between the fingers for a closure to hold.
pub const MIN_CLOSURE_POINTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum TaskStage {
    WaitHome,
    Approach,
    Take,
    Drop,
    Done,
}

impl TaskStage {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskStage::WaitHome => "WAIT_HOME",
            TaskStage::Approach => "APPROACH",
            TaskStage::Take => "TAKE",
            TaskStage::Drop => "DROP",
            TaskStage::Done => "DONE",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorldPredicates {
    pub hand_above_table: bool,
    pub has_selected_grasp: bool,
    pub at_standoff: bool,
    pub object_in_gripper: bool,
}

impl WorldPredicates {
    pub fn hand_above_table(palm: Vec3, table_z: f64) -> bool {
        palm.z - table_z > HAND_ABOVE_TABLE
    }

    pub fn at_standoff(ee: &Pose, approach: &Pose, w_q: f64) -> bool {
        pose_distance(ee, approach, w_q) < AT_STANDOFF_TOLERANCE
    }
}

/// Highest-priority action whose precondition holds.
pub fn decide(p: &WorldPredicates) -> TaskStage {
    if p.object_in_gripper {
        TaskStage::Drop
    } else if p.has_selected_grasp && p.at_standoff {
        TaskStage::Take
    } else if p.hand_above_table {
        TaskStage::Approach
    } else {
        TaskStage::WaitHome
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TakeOutcome {
    Success,
    Miss,
}

/// Closes the gripper at the target's push-in pose against the object as it
/// is right now. Succeeds when at least [`MIN_CLOSURE_POINTS`] object points
/// are between the fingers.
pub fn execute_take(object_points: &[Vec3], target: &SelectedTarget, gripper: &GripperModel) -> TakeOutcome {
    if gripper.count_in_closing_region(&target.final_pose, object_points) >= MIN_CLOSURE_POINTS {
        TakeOutcome::Success
    } else {
        TakeOutcome::Miss
    }
}

/// Stage bookkeeping for a run: current stage and closure attempts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskModel {
    pub stage: TaskStage,
    pub attempts: u32,
}

impl Default for TaskModel {
    fn default() -> Self {
        Self { stage: TaskStage::WaitHome, attempts: 0 }
    }
}

impl TaskModel {
    /// Re-decides the stage from fresh predicates. `Done` is terminal.
    pub fn tick(&mut self, preds: &WorldPredicates) -> TaskStage {
        if self.stage != TaskStage::Done {
            self.stage = decide(preds);
        }
        self.stage
    }

    pub fn record_take(&mut self, outcome: TakeOutcome) {
        self.attempts += 1;
        self.stage = match outcome {
            TakeOutcome::Success => TaskStage::Drop,
            TakeOutcome::Miss => TaskStage::Approach,
        };
    }

    pub fn finish(&mut self) {
        self.stage = TaskStage::Done;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::Grasp;
    use crate::selection::SelectionConfig;

    #[test]
    fn priority_examples() {
        let all = WorldPredicates {
            hand_above_table: true,
            has_selected_grasp: true,
            at_standoff: true,
            object_in_gripper: true,
        };
        assert_eq!(decide(&all), TaskStage::Drop);
        let approach = WorldPredicates { hand_above_table: true, ..Default::default() };
        assert_eq!(decide(&approach), TaskStage::Approach);
        assert_eq!(decide(&WorldPredicates::default()), TaskStage::WaitHome);
    }

    #[test]
    fn take_outcomes() {
        let g = GripperModel::default();
        let t = SelectedTarget::from_grasp(Grasp::new(Pose::IDENTITY, 1.0), 0.0, &SelectionConfig::default());
        let dense: alloc::vec::Vec<Vec3> = (0..20).map(|i| Vec3::new(0.0, -0.02 + 0.002 * i as f64, 0.05)).collect();
        assert_eq!(execute_take(&dense, &t, &g), TakeOutcome::Success);
        let far: alloc::vec::Vec<Vec3> = dense.iter().map(|&p| p + Vec3::new(0.2, 0.0, 0.0)).collect();
        assert_eq!(execute_take(&far, &t, &g), TakeOutcome::Miss);
    }

    #[test]
    fn attempts_count_closures() {
        let mut m = TaskModel::default();
        m.record_take(TakeOutcome::Miss);
        assert_eq!(m.stage, TaskStage::Approach);
        m.record_take(TakeOutcome::Success);
        assert_eq!((m.stage, m.attempts), (TaskStage::Drop, 2));
        m.finish();
        m.tick(&WorldPredicates::default());
        assert_eq!(m.stage, TaskStage::Done);
    }

    #[test]
    fn standoff_tolerance() {
        let a = Pose::from_translation(Vec3::new(0.5, 0.0, 0.3));
        let near = Pose::from_translation(Vec3::new(0.52, 0.0, 0.3));
        let far = Pose::from_translation(Vec3::new(0.53, 0.0, 0.3));
        assert!(WorldPredicates::at_standoff(&near, &a, 0.1));
        assert!(!WorldPredicates::at_standoff(&far, &a, 0.1));
        assert!(WorldPredicates::hand_above_table(Vec3::new(0.0, 0.0, 0.11), 0.0));
        assert!(!WorldPredicates::hand_above_table(Vec3::new(0.0, 0.0, 0.10), 0.0));
    }
}
