//! Grasp quality and grasp proposals for a parallel-jaw gripper.
//!
//! [`AntipodalEvaluator`] scores a grasp by how much of the object sits
//! between the fingers and how well the surface normals there line up with
//! the closing axis. Any object point inside a finger or the palm zeroes the
//! score.

use alloc::vec::Vec;

use crate::geometry::{Pose, Quat, Vec3};
use crate::math;
use crate::rng::SimRng;
use crate::scene::LabeledPointCloud;

/// Object points inside the closing region that saturate containment.
pub const CONTAINMENT_SATURATION: f64 = 20.0;

/// How far behind the grasp origin a sampled surface point is placed.
pub const ANCHOR_DEPTH: f64 = 0.01;

/// Default number of grasps requested from the sampler.
pub const DEFAULT_GRASP_COUNT: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grasp {
    pub pose: Pose,
    pub score: f64,
}

impl Grasp {
    pub fn new(pose: Pose, score: f64) -> Self {
        Self { pose, score: score.clamp(0.0, 1.0) }
    }
}

/// Axis-aligned box in the grasp frame.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_center_size(center: Vec3, size: Vec3) -> Self {
        let h = size * 0.5;
        Self { min: center - h, max: center + h }
    }

    pub fn contains(&self, v: Vec3) -> bool {
        v.x >= self.min.x
            && v.x <= self.max.x
            && v.y >= self.min.y
            && v.y <= self.max.y
            && v.z >= self.min.z
            && v.z <= self.max.z
    }

    pub fn dilated(&self, margin: f64) -> Aabb {
        let m = Vec3::new(margin, margin, margin);
        Aabb { min: self.min - m, max: self.max + m }
    }

    /// True when the open interiors overlap.
    pub fn interiors_overlap(&self, o: &Aabb) -> bool {
        self.min.x < o.max.x
            && o.min.x < self.max.x
            && self.min.y < o.max.y
            && o.min.y < self.max.y
            && self.min.z < o.max.z
            && o.min.z < self.max.z
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vec3::new(a.x, a.y, a.z),
            Vec3::new(b.x, a.y, a.z),
            Vec3::new(a.x, b.y, a.z),
            Vec3::new(b.x, b.y, a.z),
            Vec3::new(a.x, a.y, b.z),
            Vec3::new(b.x, a.y, b.z),
            Vec3::new(a.x, b.y, b.z),
            Vec3::new(b.x, b.y, b.z),
        ]
    }
}

/// Parallel-jaw gripper geometry in the grasp frame.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GripperModel {
    pub fingers: [Aabb; 2],
    pub palm: Aabb,
    pub closing_region: Aabb,
    pub max_aperture: f64,
}

impl Default for GripperModel {
    fn default() -> Self {
        let finger = Vec3::new(0.02, 0.01, 0.04);
        Self {
            fingers: [
                Aabb::from_center_size(Vec3::new(0.0, 0.045, 0.0), finger),
                Aabb::from_center_size(Vec3::new(0.0, -0.045, 0.0), finger),
            ],
            palm: Aabb::from_center_size(Vec3::new(0.0, 0.0, -0.04), Vec3::new(0.06, 0.10, 0.04)),
            closing_region: Aabb {
                min: Vec3::new(-0.01, -0.04, -0.02),
                max: Vec3::new(0.01, 0.04, 0.02),
            },
            max_aperture: 0.08,
        }
    }
}

impl GripperModel {
    /// Finger and palm boxes, the solid parts of the gripper.
    pub fn collision_boxes(&self) -> [Aabb; 3] {
        [self.fingers[0], self.fingers[1], self.palm]
    }

    pub fn is_consistent(&self) -> bool {
        self.fingers.iter().all(|f| !f.interiors_overlap(&self.closing_region))
            && self.closing_region.max.y - self.closing_region.min.y <= self.max_aperture + 1e-12
    }

    /// Radius of a sphere about the grasp origin enclosing every solid box
    /// dilated by `margin`.
    pub fn bounding_radius(&self, margin: f64) -> f64 {
        self.collision_boxes()
            .iter()
            .flat_map(|b| b.dilated(margin).corners())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Does any world point fall inside a solid box dilated by `margin` with
    /// the gripper at `pose`?
    pub fn collides(&self, pose: &Pose, points: &[Vec3], margin: f64) -> bool {
        let boxes = self.collision_boxes().map(|b| b.dilated(margin));
        let frame = LocalFrame::new(pose);
        let r2 = {
            let r = self.bounding_radius(margin);
            r * r
        };
        points.iter().any(|&p| {
            if p.distance_squared(pose.p) > r2 {
                return false;
            }
            let l = frame.to_local(p);
            boxes.iter().any(|b| b.contains(l))
        })
    }

    /// Number of world points inside the closing region with the gripper at
    /// `pose`.
    pub fn count_in_closing_region(&self, pose: &Pose, points: &[Vec3]) -> usize {
        let frame = LocalFrame::new(pose);
        points.iter().filter(|&&p| self.closing_region.contains(frame.to_local(p))).count()
    }
}

/// World-to-local transform with the rotation expanded once.
#[derive(Clone, Copy, Debug)]
pub struct LocalFrame {
    origin: Vec3,
    x: Vec3,
    y: Vec3,
    z: Vec3,
}

impl LocalFrame {
    pub fn new(pose: &Pose) -> Self {
        Self {
            origin: pose.p,
            x: pose.axis_x(),
            y: pose.axis_y(),
            z: pose.axis_z(),
        }
    }

    #[inline]
    pub fn to_local(&self, p: Vec3) -> Vec3 {
        let d = p - self.origin;
        Vec3::new(d.dot(self.x), d.dot(self.y), d.dot(self.z))
    }

    pub fn closing_axis(&self) -> Vec3 {
        self.y
    }
}

/// Grasp quality in `[0, 1]` against an object-only cloud in world frame.
pub trait GraspEvaluator {
    fn evaluate(&self, pose: &Pose, object: &LabeledPointCloud) -> f64;
}

impl<E: GraspEvaluator + ?Sized> GraspEvaluator for &E {
    fn evaluate(&self, pose: &Pose, object: &LabeledPointCloud) -> f64 {
        (**self).evaluate(pose, object)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AntipodalEvaluator {
    pub gripper: GripperModel,
}

impl AntipodalEvaluator {
    pub fn new(gripper: GripperModel) -> Self {
        Self { gripper }
    }
}

impl GraspEvaluator for AntipodalEvaluator {
    fn evaluate(&self, pose: &Pose, object: &LabeledPointCloud) -> f64 {
        let frame = LocalFrame::new(pose);
        let solids = self.gripper.collision_boxes();
        let region = self.gripper.closing_region;
        let y = frame.closing_axis();
        let mut n_in = 0usize;
        let mut alignment = 0.0;
        for (i, &p) in object.points.iter().enumerate() {
            let l = frame.to_local(p);
            if solids.iter().any(|b| b.contains(l)) {
                return 0.0;
            }
            if region.contains(l) {
                n_in += 1;
                // Without normals every contained point counts as aligned.
                alignment += object.normal(i).map_or(1.0, |n| math::abs(n.dot(y)));
            }
        }
        if n_in == 0 {
            return 0.0;
        }
        let containment = (n_in as f64 / CONTAINMENT_SATURATION).min(1.0);
        (containment * alignment / n_in as f64).clamp(0.0, 1.0)
    }
}

/// Proposes grasps anchored on object surface points: approach against the
/// surface normal, closing axis along a random tangent, origin pushed
/// [`ANCHOR_DEPTH`] past the anchor so it lands in the closing region.
///
/// Returns at most `n` grasps with positive score, giving up after `10·n`
/// candidates. An empty result means no graspable candidate was found.
pub fn sample_grasps<E: GraspEvaluator>(
    object: &LabeledPointCloud,
    n: usize,
    evaluator: &E,
    rng: &mut SimRng,
) -> Vec<Grasp> {
    let mut out = Vec::new();
    if object.is_empty() || n == 0 {
        return out;
    }
    let centroid = object.centroid().unwrap_or(Vec3::ZERO);
    for _ in 0..10 * n {
        if out.len() >= n {
            break;
        }
        let i = rng.below(object.len());
        let anchor = object.points[i];
        let normal = object
            .normal(i)
            .or_else(|| (anchor - centroid).try_normalize())
            .unwrap_or(Vec3::Z);
        let pose = grasp_from_anchor(anchor, normal, rng);
        let score = evaluator.evaluate(&pose, object);
        if score > 0.0 {
            out.push(Grasp::new(pose, score));
        }
    }
    out
}

fn grasp_from_anchor(anchor: Vec3, normal: Vec3, rng: &mut SimRng) -> Pose {
    let z = -normal;
    let r = rng.unit_vector();
    let y = (r - z * r.dot(z)).try_normalize().unwrap_or_else(|| z.any_orthogonal());
    let x = y.cross(z);
    Pose::new(anchor + z * ANCHOR_DEPTH, Quat::from_axes(x, y, z))
}
