use alloc::vec::Vec;

use crate::geometry::{pose_distance, Pose, Vec3};
use crate::motion::{plan_path, servo_step, EndEffectorState, MotionConfig, MotionPlan, PathQuery};
use crate::planner::AT_STANDOFF_TOLERANCE;
use crate::rng::SimRng;

use super::trace::PlanKind;

/// Follows the current motion goal: a straight line or an RRT polyline,
/// replanned when the goal moves. A blocked goal makes the arm hold still.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MotionController {
    goal: Option<Pose>,
    waypoints: Vec<Vec3>,
    next: usize,
    blocked: bool,
}

/// What a replan produced, for the trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Replan {
    pub kind: PlanKind,
    pub waypoints: Vec<Vec3>,
}

impl MotionController {
    pub fn goal(&self) -> Option<Pose> {
        self.goal
    }

    pub fn is_blocked(&self) -> bool {
        self.blocked
    }

    /// Forgets the goal; the next `set_goal` always plans.
    pub fn clear(&mut self) {
        *self = Self::default();
    }

    /// Plans toward `goal` when it differs from the current one by more than
    /// the arrival tolerance, or when the last plan was blocked.
    #[allow(clippy::too_many_arguments)]
    pub fn set_goal(
        &mut self,
        goal: Pose,
        current: &Pose,
        colliders: &[Vec3],
        table_z: f64,
        cfg: &MotionConfig,
        w_q: f64,
        rng: &mut SimRng,
    ) -> Option<Replan> {
        if let Some(g) = self.goal {
            if !self.blocked && pose_distance(&g, &goal, w_q) <= AT_STANDOFF_TOLERANCE {
                return None;
            }
        }
        self.goal = Some(goal);
        self.next = 0;
        let query = PathQuery::new(current.p, goal.p, colliders, table_z, cfg.clearance);
        let plan = plan_path(&query, rng, cfg.rrt_max_iters, cfg.rrt_step);
        let (kind, waypoints) = match plan {
            MotionPlan::Straight => (PlanKind::Straight, Vec::new()),
            MotionPlan::Waypoints(w) => (PlanKind::Rrt, w),
            MotionPlan::Blocked => (PlanKind::Blocked, Vec::new()),
        };
        self.blocked = kind == PlanKind::Blocked;
        self.waypoints = waypoints.clone();
        Some(Replan { kind, waypoints })
    }

    /// One servo tick along the plan; holds position without a goal or when
    /// blocked.
    pub fn step(&mut self, state: &EndEffectorState, dt: f64) -> EndEffectorState {
        let goal = match self.goal {
            Some(g) if !self.blocked => g,
            _ => return *state,
        };
        if let Some(&w) = self.waypoints.get(self.next) {
            let next = servo_step(state, &Pose::new(w, goal.q), dt);
            if next.pose.p == w {
                self.next += 1;
            }
            return next;
        }
        servo_step(state, &goal, dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, sin};

    #[test]
    fn enclosed_goal_holds_position() {
        // Points on a small shell around the goal.
        let goal = Vec3::new(0.5, 0.0, 0.3);
        let mut shell = Vec::new();
        for i in 0..20 {
            for j in 0..40 {
                let th = core::f64::consts::PI * (i as f64 + 0.5) / 20.0;
                let ph = core::f64::consts::TAU * j as f64 / 40.0;
                let d = Vec3::new(sin(th) * cos(ph), sin(th) * sin(ph), cos(th));
                shell.push(goal + d * 0.05);
            }
        }
        let cfg = MotionConfig { rrt_max_iters: 200, ..MotionConfig::default() };
        let start = EndEffectorState::new(Pose::from_translation(Vec3::new(0.2, 0.0, 0.3)), &cfg);
        let mut c = MotionController::default();
        let mut rng = SimRng::seed_from_u64(3);
        let plan = c.set_goal(Pose::from_translation(goal), &start.pose, &shell, 0.0, &cfg, 0.1, &mut rng);
        assert_eq!(plan.map(|p| p.kind), Some(PlanKind::Blocked));
        assert!(c.is_blocked());
        assert_eq!(c.step(&start, 1.0 / 90.0), start);
    }

    #[test]
    fn unchanged_goal_is_not_replanned() {
        let cfg = MotionConfig::default();
        let here = Pose::from_translation(Vec3::new(0.2, 0.0, 0.3));
        let goal = Pose::from_translation(Vec3::new(0.4, 0.0, 0.3));
        let mut c = MotionController::default();
        let mut rng = SimRng::seed_from_u64(3);
        assert!(c.set_goal(goal, &here, &[], 0.0, &cfg, 0.1, &mut rng).is_some());
        assert!(c.set_goal(goal, &here, &[], 0.0, &cfg, 0.1, &mut rng).is_none());
        let nudged = Pose::from_translation(Vec3::new(0.4, 0.0, 0.35));
        assert!(c.set_goal(nudged, &here, &[], 0.0, &cfg, 0.1, &mut rng).is_some());
    }
}
