mod common;

use handover_core::selection::{expand_flips, grasp_cost, select_target, Colliders, ReachableRegion};
use handover_core::{
    flip_about_grasp_z, offset_along_grasp_z, Grasp, GraspSet, GripperModel, Pose, Quat, SelectedTarget, SelectionConfig, SimRng,
    Vec3,
};
use proptest::prelude::*;

const OBJECT: Vec3 = Vec3::new(0.55, 0.0, 0.3);

fn home() -> Pose {
    common::facing_x(Vec3::new(0.3, 0.0, 0.45))
}

fn frame_along(z: Vec3, spin: f64) -> Quat {
    let y0 = z.any_orthogonal();
    let y = Quat::from_axis_angle(z, spin).rotate(y0);
    Quat::from_axes(y.cross(z), y, z)
}

/// Grasps near the object approaching from the robot's side.
fn grasps(n: usize, rng: &mut SimRng) -> Vec<Grasp> {
    (0..n)
        .map(|_| {
            let mut d = rng.unit_vector();
            d.x = d.x.abs() + 0.5;
            let z = d.try_normalize().unwrap();
            let p = OBJECT - z * 0.02 + rng.unit_vector() * 0.01;
            Grasp::new(Pose::new(p, frame_along(z, rng.uniform(0.0, std::f64::consts::TAU))), rng.uniform(0.3, 0.95))
        })
        .collect()
}

fn open_space() -> Colliders<'static> {
    Colliders { points: &[], table_z: 0.0 }
}

fn pick(set: &GraspSet, prev: &Pose, cfg: &SelectionConfig) -> Option<SelectedTarget> {
    let h = home();
    select_target(set, &h, prev, &h, &open_space(), &ReachableRegion::default(), &GripperModel::default(), cfg).target
}

#[test]
fn target_is_stable_under_small_score_noise() {
    let cfg = SelectionConfig::default();
    let mut rng = SimRng::seed_from_u64(21);
    let base = grasps(50, &mut rng);
    let first = pick(&GraspSet::new(base.clone(), 0), &home(), &cfg).unwrap();
    let mut prev = first.approach_pose;
    let mut kept = 0;
    let trials = 200;
    for _ in 0..trials {
        let noisy: Vec<Grasp> = base
            .iter()
            .map(|g| Grasp::new(g.pose, (g.score + rng.uniform(-0.049, 0.049)).clamp(0.0, 1.0)))
            .collect();
        let t = pick(&GraspSet::new(noisy, 0), &prev, &cfg).unwrap();
        if pose_eq(&t.grasp.pose, &first.grasp.pose) {
            kept += 1;
        }
        prev = t.approach_pose;
    }
    assert!(kept * 100 >= trials * 95, "kept {kept}/{trials}");
}

fn pose_eq(a: &Pose, b: &Pose) -> bool {
    a.p == b.p && a.q == b.q
}

#[test]
fn without_distance_terms_best_score_wins() {
    let cfg = SelectionConfig { w_prev: 0.0, w_home: 0.0, ..Default::default() };
    for seed in 0..20 {
        let set = GraspSet::new(grasps(30, &mut SimRng::seed_from_u64(seed)), 0);
        let best = set.grasps.iter().map(|g| g.score).fold(0.0, f64::max);
        let t = pick(&set, &home(), &cfg).unwrap();
        assert_eq!(t.grasp.score, best);
    }
}

#[test]
fn enclosed_object_has_no_target() {
    // A closed shell of hand points around the object: every approach pose
    // lies inside it and the robot starts outside.
    let mut shell = Vec::new();
    let mut rng = SimRng::seed_from_u64(4);
    for _ in 0..20_000 {
        shell.push(OBJECT + rng.unit_vector() * 0.12);
    }
    let set = GraspSet::new(grasps(30, &mut rng), 0);
    let c = Colliders { points: &shell, table_z: 0.0 };
    let h = home();
    let out = select_target(&set, &h, &h, &h, &c, &ReachableRegion::default(), &GripperModel::default(), &SelectionConfig::default());
    assert!(out.target.is_none());
    assert_eq!(out.examined, 60);
}

#[test]
fn unreachable_set_has_no_target() {
    let far = Vec3::new(1.2, 0.0, 0.3);
    let set = GraspSet::new(vec![Grasp::new(common::facing_x(far), 0.9)], 0);
    assert!(pick(&set, &home(), &SelectionConfig::default()).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn picks_cheapest_candidate_in_open_space(seed in 0u64..10_000, n in 1usize..25) {
        let cfg = SelectionConfig::default();
        let set = GraspSet::new(grasps(n, &mut SimRng::seed_from_u64(seed)), 0);
        let prev = offset_along_grasp_z(&set.grasps[0].pose, -0.1);
        let t = pick(&set, &prev, &cfg).unwrap();
        let min = expand_flips(&set)
            .grasps
            .iter()
            .map(|g| grasp_cost(&offset_along_grasp_z(&g.pose, -cfg.standoff), g.score, &prev, &home(), &cfg))
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(t.cost, min);
    }

    #[test]
    fn ranking_ignores_set_order(seed in 0u64..10_000, n in 2usize..20, rot in 1usize..19) {
        let cfg = SelectionConfig::default();
        let mut gs = grasps(n, &mut SimRng::seed_from_u64(seed));
        let a = pick(&GraspSet::new(gs.clone(), 0), &home(), &cfg).unwrap();
        gs.rotate_left(rot % n);
        let b = pick(&GraspSet::new(gs, 0), &home(), &cfg).unwrap();
        prop_assert_eq!(a.cost, b.cost);
    }

    #[test]
    fn target_poses_follow_the_grasp(seed in 0u64..10_000) {
        let cfg = SelectionConfig::default();
        let set = GraspSet::new(grasps(10, &mut SimRng::seed_from_u64(seed)), 0);
        let t = pick(&set, &home(), &cfg).unwrap();
        let z = t.grasp.pose.axis_z();
        prop_assert!((t.grasp.pose.p - t.approach_pose.p - z * 0.10).norm() < 1e-12);
        prop_assert!((t.final_pose.p - t.grasp.pose.p - z * 0.05).norm() < 1e-12);
        prop_assert_eq!(t.approach_pose.q, t.grasp.pose.q);
        prop_assert_eq!(t.final_pose.q, t.grasp.pose.q);
        prop_assert!(t.grasp.score >= 0.0 && t.grasp.score <= 1.0);
        // The winner is one of the grasps or a flipped twin with the same score.
        let from_set = set.grasps.iter().any(|g| {
            g.score == t.grasp.score && (pose_eq(&g.pose, &t.grasp.pose) || pose_eq(&flip_about_grasp_z(&g.pose), &t.grasp.pose))
        });
        prop_assert!(from_set);
    }
}
