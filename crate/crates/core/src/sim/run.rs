use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::evaluator::{sample_grasps, AntipodalEvaluator, Grasp};
use crate::geometry::{pose_distance, Pose, Quat, Vec3};
use crate::motion::{servo_step, EndEffectorState};
use crate::planner::{execute_take, TakeOutcome, TaskModel, TaskStage, WorldPredicates};
use crate::refinement::{maintain, prune_hand_collisions, GraspSet};
use crate::rng::{stream, SimRng};
use crate::scene::{apply_label_noise, crop_around_palm, sample_surface, synthesize_cloud, Label, LabeledPointCloud, SceneBody};
use crate::selection::{select_target, Colliders, SelectedTarget};
use crate::Error;

use super::controller::MotionController;
use super::scenario::{Action, Mode, Scenario, Trigger};
use super::schedule::Schedule;
use super::trace::{Displacement, Metrics, RunOutput, TraceHeader, TraceRecord};

/// Stream index for the ground-truth surface sample used at closure.
const GROUND_TRUTH: u64 = u64::MAX;

/// Fixed top-down orientation of the object-center baseline: approach along
/// world -Z.
fn top_down() -> Quat {
    Quat::from_axis_angle(Vec3::X, core::f64::consts::PI)
}

/// Open-loop phases that bypass the task model until they finish.
#[derive(Clone, Copy, Debug)]
enum Phase {
    Reactive,
    Plunge(SelectedTarget),
    Retreat(Pose),
}

struct Sim<'a> {
    s: &'a Scenario,
    schedule: Schedule,
    evaluator: AntipodalEvaluator,
    ground_truth: Vec<Vec3>,

    // Human side.
    grip_offset: Pose,
    hand_shift: Vec3,
    lowered: bool,
    fired: Vec<bool>,
    tracked_palm: Pose,

    // Perception and grasps.
    object_cloud: LabeledPointCloud,
    hand_points: Vec<Vec3>,
    /// Inputs of the last segmentation; the cloud stream restarts every
    /// update, so unchanged inputs give the same cloud.
    seen: Option<(Pose, Pose, Pose)>,
    emitted_hand: Option<Vec<Vec3>>,
    grasps: GraspSet,
    refined_once: bool,
    fresh_grasps: bool,

    // Robot side.
    ee: EndEffectorState,
    moved: bool,
    attached: Option<Pose>,
    task: TaskModel,
    phase: Phase,
    controller: MotionController,
    target: Option<SelectedTarget>,
    x_prev: Pose,
    last_planned: Option<Pose>,
    candidate_count: usize,
    drop_since: Option<f64>,

    metrics: Metrics,
}

/// Runs a scenario to DONE or its time limit. Pure and deterministic: the
/// same scenario always yields the same records.
pub fn run(s: &Scenario) -> Result<RunOutput, Error> {
    s.validate()?;
    let mut sim = Sim::new(s);
    let header = TraceHeader {
        scenario: s.name.clone(),
        seed: s.seed,
        mode: s.mode,
        dt: sim.schedule.dt(),
        v_max: s.config.motion.v_max,
        w_max: s.config.motion.w_max,
        hand_margin: s.config.refinement.hand_margin,
        w_q: s.config.selection.w_q,
        gripper: s.config.gripper,
    };
    let mut records = Vec::new();
    let mut tick = 0u64;
    loop {
        let t = tick as f64 * sim.schedule.dt();
        if t > s.time_limit + 1e-9 {
            break;
        }
        let rec = sim.step(tick, t)?;
        let done = rec.stage == TaskStage::Done;
        records.push(rec);
        if done {
            break;
        }
        tick += 1;
    }
    let last_t = records.last().map_or(0.0, |r| r.sim_time);
    sim.metrics.attempts = sim.task.attempts;
    if !sim.metrics.success {
        sim.metrics.time_to_success = last_t;
    }
    Ok(RunOutput { metrics: sim.metrics, header, records })
}

impl<'a> Sim<'a> {
    fn new(s: &'a Scenario) -> Self {
        let cfg = &s.config;
        let body = SceneBody::new(s.object, Pose::IDENTITY, Label::Object);
        let mut gt_rng = SimRng::derive(s.seed, &[stream::CLOUD, GROUND_TRUTH]);
        let ground_truth = sample_surface(&body, cfg.scene.density, &mut gt_rng);
        Self {
            s,
            schedule: Schedule::default(),
            evaluator: AntipodalEvaluator::new(cfg.gripper),
            ground_truth,
            grip_offset: s.grip_offset,
            hand_shift: Vec3::ZERO,
            lowered: false,
            fired: vec![false; s.events.len()],
            tracked_palm: s.palm_at(0.0),
            object_cloud: LabeledPointCloud::new(),
            hand_points: Vec::new(),
            seen: None,
            emitted_hand: None,
            grasps: GraspSet::default(),
            refined_once: false,
            fresh_grasps: false,
            ee: EndEffectorState::new(cfg.home, &cfg.motion),
            moved: false,
            attached: None,
            task: TaskModel::default(),
            phase: Phase::Reactive,
            controller: MotionController::default(),
            target: None,
            x_prev: cfg.home,
            last_planned: None,
            candidate_count: 0,
            drop_since: None,
            metrics: Metrics::default(),
        }
    }

    fn palm(&self, t: f64) -> Pose {
        let mut palm = self.s.palm_at(t);
        palm.p += self.hand_shift;
        if self.lowered {
            palm.p.z = self.s.config.scene.table_z + 0.05;
        }
        palm
    }

    fn object_pose(&self, palm: &Pose) -> Pose {
        match self.attached {
            Some(rel) => self.ee.pose.compose(rel),
            None => palm.compose(self.grip_offset),
        }
    }

    fn step(&mut self, tick: u64, t: f64) -> Result<TraceRecord, Error> {
        let events = self.fire_events(t);
        let palm = self.palm(t);
        if self.schedule.tracking(tick) {
            self.tracked_palm = palm;
        }

        let mut hand_cloud = None;
        if self.schedule.segmentation(tick) {
            self.segment(tick, &palm)?;
            if self.emitted_hand.as_ref() != Some(&self.hand_points) {
                self.emitted_hand = Some(self.hand_points.clone());
                hand_cloud = self.emitted_hand.clone();
            }
        }

        let mut resampled = false;
        if self.schedule.refinement(tick) && self.attached.is_none() {
            resampled = self.refine(&palm);
        }

        let mut plan = None;
        let mut waypoints = None;
        if self.schedule.planning(tick) {
            if let Some(r) = self.plan(tick) {
                if !r.waypoints.is_empty() {
                    waypoints = Some(r.waypoints);
                }
                plan = Some(r.kind);
            }
        }

        self.move_robot(t, &palm);

        Ok(TraceRecord {
            tick,
            sim_time: t,
            stage: self.task.stage,
            ee_pose: self.ee.pose,
            selected_target: self.target,
            candidate_count: self.candidate_count,
            resampled,
            attempt_count: self.task.attempts,
            hand_cloud,
            events,
            plan,
            waypoints,
        })
    }

    fn fire_events(&mut self, t: f64) -> Vec<String> {
        let mut names = Vec::new();
        for (i, ev) in self.s.events.iter().enumerate() {
            if self.fired[i] {
                continue;
            }
            let due = match ev.trigger {
                Trigger::Time(at) => at <= t + 1e-12,
                Trigger::RobotStartedMoving => self.moved,
            };
            if !due {
                continue;
            }
            self.fired[i] = true;
            names.push(String::from(ev.action.name()));
            match ev.action {
                Action::RotateObject { axis, angle } => {
                    if self.attached.is_none() {
                        let palm = self.palm(t);
                        let obj = palm.compose(self.grip_offset);
                        let turned = Pose::new(obj.p, Quat::from_axis_angle(axis, angle).mul(obj.q));
                        self.grip_offset = palm.inverse().compose(turned);
                    }
                }
                Action::TranslateHand(d) => self.hand_shift += d,
                Action::LowerHand => self.lowered = true,
            }
        }
        names
    }

    fn segment(&mut self, tick: u64, palm: &Pose) -> Result<(), Error> {
        let cfg = &self.s.config;
        let object_pose = self.object_pose(palm);
        let inputs = (object_pose, *palm, self.tracked_palm);
        if cfg.scene.label_noise > 0.0 || self.seen != Some(inputs) {
            let object = SceneBody::new(self.s.object, object_pose, Label::Object);
            let hand = self.s.hand_model(*palm);
            let mut rng = SimRng::derive(self.s.seed, &[stream::CLOUD]);
            let cloud = synthesize_cloud(&[object], Some(&hand), &cfg.scene.camera, cfg.scene.density, &mut rng)?;
            let mut cloud = crop_around_palm(&cloud, self.tracked_palm.p, cfg.scene.crop_radius);
            if cfg.scene.label_noise > 0.0 {
                let mut rng = SimRng::derive(self.s.seed, &[stream::LABEL_NOISE, tick]);
                cloud = apply_label_noise(&cloud, cfg.scene.label_noise, &mut rng)?;
            }
            self.object_cloud = cloud.with_label(Label::Object);
            self.hand_points = cloud.with_label(Label::Hand).points;
            self.seen = Some(inputs);
        }

        // A target that the hand has moved onto is dropped at once, even
        // mid-plunge.
        if let Some(target) = self.target {
            if cfg.gripper.collides(&target.grasp.pose, &self.hand_points, cfg.refinement.hand_margin) {
                self.target = None;
                if let Phase::Plunge(p) = self.phase {
                    self.phase = Phase::Retreat(p.approach_pose);
                    self.task.stage = TaskStage::Approach;
                }
            }
        }
        Ok(())
    }

    /// Mode-specific grasp maintenance. Returns whether new grasps were
    /// sampled.
    fn refine(&mut self, palm: &Pose) -> bool {
        let cfg = &self.s.config;
        let frame = self.grasps.frame_index + 1;
        let resampled = match self.s.mode {
            Mode::ObjectCenter => {
                let center = self.object_pose(palm).p;
                self.grasps = GraspSet::new(vec![Grasp::new(Pose::new(center, top_down()), 1.0)], frame);
                !self.refined_once
            }
            Mode::Naive => {
                let mut rng = SimRng::derive(self.s.seed, &[stream::SAMPLE, frame]);
                let fresh = sample_grasps(&self.object_cloud, cfg.refinement.target_size, &self.evaluator, &mut rng);
                let set = GraspSet::new(fresh, frame);
                self.grasps = prune_hand_collisions(&set, &self.hand_points, &cfg.gripper, cfg.refinement.hand_margin);
                true
            }
            Mode::Temporal | Mode::TemporalPlus => {
                let out = maintain(
                    &self.grasps,
                    &self.object_cloud,
                    &self.hand_points,
                    &self.evaluator,
                    &cfg.gripper,
                    &cfg.refinement,
                    self.s.seed,
                );
                self.grasps = out.set;
                out.resampled
            }
        };
        self.metrics.refinement_ticks += 1;
        if resampled && self.refined_once {
            self.metrics.resamples_after_bootstrap += 1;
        }
        self.refined_once = true;
        self.fresh_grasps = true;
        resampled
    }

    fn plan(&mut self, tick: u64) -> Option<super::controller::Replan> {
        if !matches!(self.phase, Phase::Reactive) {
            return None;
        }
        let cfg = &self.s.config;
        let hand_up = WorldPredicates::hand_above_table(self.tracked_palm.p, cfg.scene.table_z);

        if hand_up && self.attached.is_none() {
            let selection = self.s.mode.selection_config(&cfg.selection);
            let colliders = Colliders { points: &self.hand_points, table_z: cfg.scene.table_z };
            let out = select_target(
                &self.grasps,
                &self.ee.pose,
                &self.x_prev,
                &cfg.home,
                &colliders,
                &cfg.region,
                &cfg.gripper,
                &selection,
            );
            self.target = out.target;
            self.candidate_count = out.candidate_count;
            if let Some(t) = self.target {
                self.x_prev = t.approach_pose;
            }
        } else {
            self.target = None;
            self.candidate_count = 0;
        }

        let current = self.target.map(|t| t.approach_pose);
        if let (Some(now), Some(before)) = (current, self.last_planned) {
            self.metrics.displacements.push(Displacement {
                tick,
                distance: pose_distance(&now, &before, cfg.selection.w_q),
                fresh_grasps: self.fresh_grasps,
            });
        }
        self.last_planned = current;
        self.fresh_grasps = false;

        let preds = WorldPredicates {
            hand_above_table: hand_up,
            has_selected_grasp: self.target.is_some(),
            at_standoff: self
                .target
                .is_some_and(|t| WorldPredicates::at_standoff(&self.ee.pose, &t.approach_pose, cfg.selection.w_q)),
            object_in_gripper: self.attached.is_some(),
        };
        let goal = match self.task.tick(&preds) {
            TaskStage::Take => {
                if let Some(t) = self.target {
                    self.phase = Phase::Plunge(t);
                }
                self.controller.clear();
                return None;
            }
            TaskStage::Drop => cfg.drop_pose,
            TaskStage::Approach => match self.target {
                Some(t) => t.approach_pose,
                None => self.tracking_pose(),
            },
            TaskStage::WaitHome | TaskStage::Done => cfg.home,
        };

        let mut colliders = self.hand_points.clone();
        if self.attached.is_none() {
            colliders.extend_from_slice(&self.object_cloud.points);
        }
        let mut rng = SimRng::derive(self.s.seed, &[stream::RRT, tick]);
        let replan = self.controller.set_goal(
            goal,
            &self.ee.pose,
            &colliders,
            cfg.scene.table_z,
            &cfg.motion,
            cfg.selection.w_q,
            &mut rng,
        );
        if let Some(r) = &replan {
            match r.kind {
                super::trace::PlanKind::Rrt => self.metrics.rrt_plans += 1,
                super::trace::PlanKind::Blocked => self.metrics.blocked_plans += 1,
                super::trace::PlanKind::Straight => {}
            }
        }
        replan
    }

    /// Stand-off pose while no grasp is feasible: on the line from the object
    /// toward the end effector, keeping the current orientation.
    fn tracking_pose(&self) -> Pose {
        let cfg = &self.s.config;
        let Some(c) = self.object_cloud.centroid() else {
            return cfg.home;
        };
        let dir = (self.ee.pose.p - c).try_normalize().unwrap_or(-Vec3::X);
        Pose::new(c + dir * cfg.tracking_distance, self.ee.pose.q)
    }

    fn move_robot(&mut self, t: f64, palm: &Pose) {
        let dt = self.schedule.dt();
        let before = self.ee.pose;
        match self.phase {
            Phase::Plunge(target) => {
                self.ee = servo_step(&self.ee, &target.final_pose, dt);
                if self.ee.pose == target.final_pose {
                    let object = self.object_pose(palm);
                    let points: Vec<Vec3> = self.ground_truth.iter().map(|&p| object.transform_point(p)).collect();
                    let outcome = execute_take(&points, &target, &self.s.config.gripper);
                    self.task.record_take(outcome);
                    match outcome {
                        TakeOutcome::Success => {
                            self.attached = Some(self.ee.pose.inverse().compose(object));
                            self.target = None;
                            self.phase = Phase::Retreat(target.approach_pose);
                        }
                        TakeOutcome::Miss => self.phase = Phase::Retreat(target.approach_pose),
                    }
                }
            }
            Phase::Retreat(to) => {
                self.ee = servo_step(&self.ee, &to, dt);
                if self.ee.pose == to {
                    self.phase = Phase::Reactive;
                }
            }
            Phase::Reactive => {
                self.ee = self.controller.step(&self.ee, dt);
                let drop = self.s.config.drop_pose;
                if self.task.stage == TaskStage::Drop && self.ee.pose == drop {
                    let since = *self.drop_since.get_or_insert(t);
                    if t - since >= self.s.config.drop_duration - 1e-9 {
                        self.task.finish();
                        self.metrics.success = true;
                        self.metrics.time_to_success = t;
                    }
                }
            }
        }
        if self.ee.pose != before {
            self.moved = true;
        }
    }
}
