#![allow(dead_code)]

use handover_core::{Pose, Quat, Vec3};
use proptest::prelude::*;

pub fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Raw quaternion components, rejecting near-zero norms.
pub fn quat_raw() -> impl Strategy<Value = [f64; 4]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
        .prop_filter("non-degenerate", |q| q.iter().map(|c| c * c).sum::<f64>() > 1e-3)
}

pub fn quat() -> impl Strategy<Value = Quat> {
    quat_raw().prop_map(|[x, y, z, w]| Quat::new(x, y, z, w))
}

pub fn pose(range: f64) -> impl Strategy<Value = Pose> {
    (vec3(range), quat()).prop_map(|(p, q)| Pose::new(p, q))
}

/// Gripper approaching along world +X, closing along world Y.
pub fn facing_x(p: Vec3) -> Pose {
    Pose::new(p, Quat::from_axis_angle(Vec3::Y, std::f64::consts::FRAC_PI_2))
}
