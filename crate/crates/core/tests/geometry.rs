mod common;

use common::{pose, quat_raw, vec3};
use handover_core::{flip_about_grasp_z, offset_along_grasp_z, pose_distance, Pose, Quat, Vec3};
use proptest::prelude::*;

fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
    a.distance(b) <= tol
}

proptest! {
    #[test]
    fn distance_is_symmetric_and_non_negative(a in pose(1.0), b in pose(1.0), w_q in 0.0..1.0f64) {
        let ab = pose_distance(&a, &b, w_q);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, pose_distance(&b, &a, w_q));
        prop_assert!(pose_distance(&a, &a, w_q).abs() < 1e-12);
    }

    #[test]
    fn double_cover_does_not_change_distance(p in vec3(1.0), raw in quat_raw(), other in pose(1.0)) {
        let [x, y, z, w] = raw;
        let a = Pose::new(p, Quat::new(x, y, z, w));
        let b = Pose::new(p, Quat::new(-x, -y, -z, -w));
        prop_assert_eq!(a.q, b.q);
        prop_assert_eq!(pose_distance(&a, &other, 0.1), pose_distance(&b, &other, 0.1));
    }

    #[test]
    fn quaternions_are_unit_and_canonical(raw in quat_raw()) {
        let q = Quat::new(raw[0], raw[1], raw[2], raw[3]);
        let n: f64 = q.to_array().iter().map(|c| c * c).sum();
        prop_assert!((n.sqrt() - 1.0).abs() < 1e-9);
        prop_assert!(q.w() >= 0.0);
    }

    #[test]
    fn offsets_compose_additively(g in pose(1.0), a in -0.2..0.2f64, b in -0.2..0.2f64) {
        let stepwise = offset_along_grasp_z(&offset_along_grasp_z(&g, a), b);
        let direct = offset_along_grasp_z(&g, a + b);
        prop_assert!(close(stepwise.p, direct.p, 1e-12));
        prop_assert_eq!(stepwise.q, g.q);
        prop_assert!(((stepwise.p - g.p).dot(g.axis_z()) - (a + b)).abs() < 1e-12);
    }

    #[test]
    fn flip_keeps_position_and_approach_axis(g in pose(1.0), other in pose(1.0)) {
        let f = flip_about_grasp_z(&g);
        prop_assert_eq!(f.p, g.p);
        prop_assert!(close(f.axis_z(), g.axis_z(), 1e-9));
        prop_assert!(close(f.axis_x(), -g.axis_x(), 1e-9));
        prop_assert!(close(f.axis_y(), -g.axis_y(), 1e-9));
        let pos_term = |a: &Pose, b: &Pose| a.p.distance_squared(b.p);
        prop_assert_eq!(pos_term(&f, &other), pos_term(&g, &other));
        let back = flip_about_grasp_z(&f);
        prop_assert!(pose_distance(&back, &g, 1.0) < 1e-12);
    }
}

#[test]
fn worked_distance_values() {
    let origin = Pose::IDENTITY;
    let shifted = Pose::from_translation(Vec3::new(1.0, 0.0, 0.0));
    assert_eq!(pose_distance(&origin, &origin, 0.1), 0.0);
    assert!((pose_distance(&origin, &shifted, 0.1) - 1.0).abs() < 1e-12);
    let turned = Pose::new(Vec3::ZERO, Quat::from_axis_angle(Vec3::Z, std::f64::consts::FRAC_PI_2));
    // 0.1 · (1 − cos 45°)
    assert!((pose_distance(&origin, &turned, 0.1) - 0.029_289_321_881_345_25).abs() < 1e-9);
}

#[test]
fn standoff_and_push_in() {
    let g = Pose::IDENTITY;
    assert_eq!(offset_along_grasp_z(&g, -0.10).p, Vec3::new(0.0, 0.0, -0.10));
    assert_eq!(offset_along_grasp_z(&g, 0.05).p, Vec3::new(0.0, 0.0, 0.05));
    assert_eq!(offset_along_grasp_z(&g, 0.0), g);
}

#[test]
fn flip_of_sideways_grasp() {
    let g = common::facing_x(Vec3::new(0.3, 0.1, 0.2));
    let f = flip_about_grasp_z(&g);
    assert!(close(f.axis_z(), Vec3::X, 1e-12));
    assert!(close(f.axis_y(), -g.axis_y(), 1e-12));
}
