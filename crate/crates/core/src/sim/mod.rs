//! Fixed-rate simulation of a handover: a scripted human hand holding a
//! primitive object, the perception and grasp pipeline running at their own
//! rates, and a velocity-limited end effector.

pub mod audit;
pub mod controller;
pub mod run;
pub mod scenario;
pub mod schedule;
pub mod trace;

pub use audit::{audit, Violation};
pub use run::run;
pub use scenario::{Action, Event, Keyframe, Mode, Scenario, SceneConfig, SimConfig, Trigger};
pub use schedule::Schedule;
pub use trace::{Metrics, PlanKind, RunOutput, TraceHeader, TraceRecord};
