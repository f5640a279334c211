use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::evaluator::GripperModel;
use crate::geometry::{Pose, Quat, Vec3};
use crate::motion::MotionConfig;
use crate::refinement::PerturbationConfig;
use crate::scene::{HandModel, PrimitiveShape, DEFAULT_CROP_RADIUS};
use crate::selection::{ReachableRegion, SelectionConfig};
use crate::Error;

/// How grasps are maintained and chosen between planning ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    /// One fixed top-down grasp at the object centroid.
    ObjectCenter,
    /// Fresh grasps every refinement tick, best score wins.
    Naive,
    /// Refined grasps, score plus previous-target term.
    Temporal,
    /// Refined grasps with the full selection cost.
    TemporalPlus,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::ObjectCenter, Mode::Naive, Mode::Temporal, Mode::TemporalPlus];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ObjectCenter => "object_center",
            Mode::Naive => "naive",
            Mode::Temporal => "temporal",
            Mode::TemporalPlus => "temporal_plus",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }

    /// Selection weights this mode runs with.
    pub fn selection_config(self, base: &SelectionConfig) -> SelectionConfig {
        match self {
            Mode::Naive => SelectionConfig { w_prev: 0.0, w_home: 0.0, ..*base },
            Mode::Temporal => SelectionConfig { w_home: 0.0, ..*base },
            Mode::ObjectCenter | Mode::TemporalPlus => *base,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keyframe {
    pub t: f64,
    pub pose: Pose,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Trigger {
    Time(f64),
    RobotStartedMoving,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Action {
    /// Rotates the held object about its own center; axis in world frame.
    RotateObject { axis: Vec3, angle: f64 },
    /// Shifts the hand (and held object) by a world offset from now on.
    TranslateHand(Vec3),
    /// Drops the palm to just above the table for the rest of the run.
    LowerHand,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::RotateObject { .. } => "rotate_object",
            Action::TranslateHand(_) => "translate_hand",
            Action::LowerHand => "lower_hand",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub trigger: Trigger,
    pub action: Action,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SceneConfig {
    /// Surface sampling density, points/m².
    pub density: f64,
    pub crop_radius: f64,
    pub label_noise: f64,
    pub camera: Pose,
    pub table_z: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            density: 1e5,
            crop_radius: DEFAULT_CROP_RADIUS,
            label_noise: 0.0,
            camera: Pose::from_translation(Vec3::new(0.1, 0.0, 0.55)),
            table_z: 0.0,
        }
    }
}

/// Gripper pointing at the human (+X), closing along world Y.
pub fn facing_human() -> Quat {
    Quat::from_axis_angle(Vec3::Y, core::f64::consts::FRAC_PI_2)
}

/// Every tunable the simulator reads; scenario files override fields.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub scene: SceneConfig,
    pub refinement: PerturbationConfig,
    pub selection: SelectionConfig,
    pub motion: MotionConfig,
    pub region: ReachableRegion,
    pub gripper: GripperModel,
    pub home: Pose,
    pub drop_pose: Pose,
    /// Seconds spent over the drop zone before release.
    pub drop_duration: f64,
    /// Distance kept from the object while tracking without a grasp.
    pub tracking_distance: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            refinement: PerturbationConfig::default(),
            selection: SelectionConfig::default(),
            motion: MotionConfig::default(),
            region: ReachableRegion::default(),
            gripper: GripperModel::default(),
            home: Pose::new(Vec3::new(0.30, 0.0, 0.40), facing_human()),
            drop_pose: Pose::new(Vec3::new(0.20, -0.40, 0.30), facing_human()),
            drop_duration: 1.0,
            tracking_distance: 0.25,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.refinement.validate()?;
        self.selection.validate()?;
        self.motion.validate()?;
        if !(self.scene.density > 0.0) {
            return Err(Error::InvalidDensity);
        }
        if !(0.0..=1.0).contains(&self.scene.label_noise) {
            return Err(Error::InvalidProbability);
        }
        if !(self.scene.crop_radius > 0.0) || !(self.drop_duration >= 0.0) || !(self.tracking_distance > 0.0) {
            return Err(Error::InvalidConfig("scene"));
        }
        Ok(())
    }
}

/// Default hand: a palm sphere with two pairs of finger pads wrapping the
/// back of an object held 7.5 cm in front of the palm (toward -X).
pub fn default_finger_spheres() -> Vec<(Vec3, f64)> {
    vec![
        (Vec3::ZERO, 0.035),
        (Vec3::new(-0.06, 0.038, 0.02), 0.012),
        (Vec3::new(-0.06, -0.038, 0.02), 0.012),
        (Vec3::new(-0.06, 0.038, -0.015), 0.012),
        (Vec3::new(-0.06, -0.038, -0.015), 0.012),
    ]
}

pub fn default_grip_offset() -> Pose {
    Pose::from_translation(Vec3::new(-0.075, 0.0, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub object: PrimitiveShape,
    pub grip_offset: Pose,
    pub finger_spheres: Vec<(Vec3, f64)>,
    pub hand_trajectory: Vec<Keyframe>,
    pub events: Vec<Event>,
    pub mode: Mode,
    pub config: SimConfig,
    /// Simulated seconds.
    pub time_limit: f64,
}

impl Scenario {
    /// A hand holding `object` still at `palm`, with default everything.
    pub fn held_still(name: &str, object: PrimitiveShape, palm: Pose) -> Self {
        Self {
            name: name.into(),
            seed: 0,
            object,
            grip_offset: default_grip_offset(),
            finger_spheres: default_finger_spheres(),
            hand_trajectory: vec![Keyframe { t: 0.0, pose: palm }],
            events: Vec::new(),
            mode: Mode::TemporalPlus,
            config: SimConfig::default(),
            time_limit: 60.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.object.validate()?;
        self.hand_model(Pose::IDENTITY).validate()?;
        if self.hand_trajectory.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if self.hand_trajectory.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::KeyframesNotIncreasing);
        }
        if !(self.time_limit > 0.0) {
            return Err(Error::InvalidTimeLimit);
        }
        self.config.validate()
    }

    pub fn hand_model(&self, palm: Pose) -> HandModel {
        HandModel {
            palm_center: palm,
            finger_spheres: self.finger_spheres.clone(),
            grip_offset: self.grip_offset,
        }
    }

    /// Palm pose at time `t`: piecewise linear position, slerped orientation,
    /// held constant outside the keyframe range.
    pub fn palm_at(&self, t: f64) -> Pose {
        let kf = &self.hand_trajectory;
        if t <= kf[0].t {
            return kf[0].pose;
        }
        for w in kf.windows(2) {
            if t <= w[1].t {
                let s = (t - w[0].t) / (w[1].t - w[0].t);
                return Pose::new(w[0].pose.p.lerp(w[1].pose.p, s), w[0].pose.q.slerp(w[1].pose.q, s));
            }
        }
        kf[kf.len() - 1].pose
    }
}
