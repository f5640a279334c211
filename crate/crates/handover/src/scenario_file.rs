//! TOML scenario files.
//!
//! ```toml
//! seed = 7
//! mode = "temporal_plus"
//! time_limit = 60.0
//!
//! [object]
//! kind = "cylinder"            # box | cylinder | capsule | sphere
//! dims = [0.03, 0.20]          # box: [x, y, z]; cylinder/capsule: [radius, length]; sphere: [radius]
//! grip_offset = [-0.075, 0, 0, 0, 0, 0, 1]
//!
//! [[hand_trajectory]]
//! t = 0.0
//! pose = [0.62, 0, 0.30, 0, 0, 0, 1]
//!
//! [[events]]
//! trigger = "robot_started_moving"     # or { time = 2.5 }
//! action = { rotate_object = { axis = [1, 0, 0], degrees = 90 } }
//!
//! [overrides.motion]
//! v_max = 0.2
//! ```
//!
//! Poses are `[px, py, pz, qx, qy, qz, qw]`.

use std::fs;
use std::path::{Path, PathBuf};

use handover_core::scene::PrimitiveShape;
use handover_core::sim::scenario::{default_finger_spheres, default_grip_offset};
use handover_core::sim::{Action, Event, Keyframe, Mode, Scenario, SimConfig, Trigger};
use handover_core::{Pose, Vec3};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    #[serde(default)]
    seed: u64,
    object: ObjectDef,
    /// Hand spheres as `[x, y, z, radius]` in the palm frame.
    hand_spheres: Option<Vec<[f64; 4]>>,
    hand_trajectory: Vec<KeyframeDef>,
    #[serde(default)]
    events: Vec<EventDef>,
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default)]
    overrides: SimConfig,
    #[serde(default = "default_time_limit")]
    time_limit: f64,
}

fn default_mode() -> Mode {
    Mode::TemporalPlus
}

fn default_time_limit() -> f64 {
    60.0
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ShapeKind {
    Box,
    Cylinder,
    Capsule,
    Sphere,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDef {
    kind: ShapeKind,
    dims: Vec<f64>,
    grip_offset: Option<Pose>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyframeDef {
    t: f64,
    pose: Pose,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TriggerDef {
    Time(f64),
    RobotStartedMoving,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ActionDef {
    RotateObject { axis: Vec3, degrees: f64 },
    TranslateHand(Vec3),
    LowerHand,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDef {
    trigger: TriggerDef,
    action: ActionDef,
}

/// Reads and validates a scenario file. The scenario name defaults to the
/// file stem.
pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.into(), source })?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse(&text, &stem).map_err(|source| ScenarioError::Parse { path: path.into(), source })
}

/// Parses scenario text; `default_name` is used when the file has no `name`.
pub fn parse(text: &str, default_name: &str) -> Result<Scenario, ParseError> {
    let file: ScenarioFile = toml::from_str(text)?;
    let d = &file.object.dims;
    let object = match (&file.object.kind, d.len()) {
        (ShapeKind::Box, 3) => PrimitiveShape::Box { extents: [d[0], d[1], d[2]] },
        (ShapeKind::Cylinder, 2) => PrimitiveShape::Cylinder { radius: d[0], length: d[1] },
        (ShapeKind::Capsule, 2) => PrimitiveShape::Capsule { radius: d[0], length: d[1] },
        (ShapeKind::Sphere, 1) => PrimitiveShape::Sphere { radius: d[0] },
        (kind, n) => return Err(ParseError::Invalid(format!("{kind:?} object cannot take {n} dims"))),
    };

    let mut events = Vec::with_capacity(file.events.len());
    for e in file.events {
        let trigger = match e.trigger {
            TriggerDef::Time(t) => Trigger::Time(t),
            TriggerDef::RobotStartedMoving => Trigger::RobotStartedMoving,
        };
        let action = match e.action {
            ActionDef::RotateObject { axis, degrees } => {
                let axis = axis.try_normalize().ok_or_else(|| ParseError::Invalid("rotation axis has zero length".into()))?;
                Action::RotateObject { axis, angle: degrees.to_radians() }
            }
            ActionDef::TranslateHand(d) => Action::TranslateHand(d),
            ActionDef::LowerHand => Action::LowerHand,
        };
        events.push(Event { trigger, action });
    }

    let finger_spheres = match file.hand_spheres {
        Some(s) => s.into_iter().map(|[x, y, z, r]| (Vec3::new(x, y, z), r)).collect(),
        None => default_finger_spheres(),
    };

    let scenario = Scenario {
        name: file.name.unwrap_or_else(|| default_name.to_owned()),
        seed: file.seed,
        object,
        grip_offset: file.object.grip_offset.unwrap_or_else(default_grip_offset),
        finger_spheres,
        hand_trajectory: file.hand_trajectory.into_iter().map(|k| Keyframe { t: k.t, pose: k.pose }).collect(),
        events,
        mode: file.mode,
        config: file.overrides,
        time_limit: file.time_limit,
    };
    scenario.validate().map_err(|e| ParseError::Invalid(e.to_string()))?;
    Ok(scenario)
}
