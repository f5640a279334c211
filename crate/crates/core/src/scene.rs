//! Synthetic desk scene: primitive objects, a sphere-based hand, and the
//! labeled point clouds a segmentation front end would hand to the grasp
//! pipeline.

use alloc::vec::Vec;

use crate::geometry::{Pose, Vec3};
use crate::math;
use crate::rng::SimRng;
use crate::Error;

/// Default palm-centered crop radius, meters.
pub const DEFAULT_CROP_RADIUS: f64 = 0.20;

/// Primitive solid in its own frame. Cylinders and capsules run along local Z
/// and are centered at the origin; `length` is the straight section.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PrimitiveShape {
    Box { extents: [f64; 3] },
    Cylinder { radius: f64, length: f64 },
    Capsule { radius: f64, length: f64 },
    Sphere { radius: f64 },
}

impl PrimitiveShape {
    pub fn validate(&self) -> Result<(), Error> {
        let ok = match *self {
            PrimitiveShape::Box { extents } => extents.iter().all(|&e| e > 0.0),
            PrimitiveShape::Cylinder { radius, length } | PrimitiveShape::Capsule { radius, length } => {
                radius > 0.0 && length > 0.0
            }
            PrimitiveShape::Sphere { radius } => radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidShape)
        }
    }

    /// Signed distance from a point in the shape frame to the surface,
    /// negative inside.
    pub fn signed_distance(&self, v: Vec3) -> f64 {
        match *self {
            PrimitiveShape::Sphere { radius } => v.norm() - radius,
            PrimitiveShape::Box { extents } => {
                let q = Vec3::new(
                    math::abs(v.x) - extents[0] * 0.5,
                    math::abs(v.y) - extents[1] * 0.5,
                    math::abs(v.z) - extents[2] * 0.5,
                );
                let outside = Vec3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
                outside + q.x.max(q.y).max(q.z).min(0.0)
            }
            PrimitiveShape::Cylinder { radius, length } => {
                let dr = math::sqrt(v.x * v.x + v.y * v.y) - radius;
                let dz = math::abs(v.z) - length * 0.5;
                let outside = math::sqrt(dr.max(0.0) * dr.max(0.0) + dz.max(0.0) * dz.max(0.0));
                outside + dr.max(dz).min(0.0)
            }
            PrimitiveShape::Capsule { radius, length } => {
                let h = length * 0.5;
                let z = v.z.clamp(-h, h);
                Vec3::new(v.x, v.y, v.z - z).norm() - radius
            }
        }
    }

    fn surface_patches(&self) -> impl Iterator<Item = (Patch, f64)> {
        let mut out: [(Patch, f64); 6] = [(Patch::None, 0.0); 6];
        match *self {
            PrimitiveShape::Sphere { radius } => {
                out[0] = (Patch::Sphere { radius, center_z: 0.0, hemisphere: 0.0 }, 4.0 * core::f64::consts::PI * radius * radius);
            }
            PrimitiveShape::Cylinder { radius, length } => {
                let pi = core::f64::consts::PI;
                out[0] = (Patch::Tube { radius, length }, 2.0 * pi * radius * length);
                out[1] = (Patch::Disk { radius, z: length * 0.5 }, pi * radius * radius);
                out[2] = (Patch::Disk { radius, z: -length * 0.5 }, pi * radius * radius);
            }
            PrimitiveShape::Capsule { radius, length } => {
                let pi = core::f64::consts::PI;
                out[0] = (Patch::Tube { radius, length }, 2.0 * pi * radius * length);
                out[1] = (Patch::Sphere { radius, center_z: length * 0.5, hemisphere: 1.0 }, 2.0 * pi * radius * radius);
                out[2] = (Patch::Sphere { radius, center_z: -length * 0.5, hemisphere: -1.0 }, 2.0 * pi * radius * radius);
            }
            PrimitiveShape::Box { extents } => {
                let [a, b, c] = extents;
                for (i, axis) in [0usize, 1, 2].into_iter().enumerate() {
                    let (u, v) = match axis {
                        0 => (b, c),
                        1 => (a, c),
                        _ => (a, b),
                    };
                    let half = extents[axis] * 0.5;
                    out[2 * i] = (Patch::Face { axis, offset: half, extents }, u * v);
                    out[2 * i + 1] = (Patch::Face { axis, offset: -half, extents }, u * v);
                }
            }
        }
        out.into_iter().filter(|(p, _)| !matches!(p, Patch::None))
    }

    /// Total surface area, m².
    pub fn surface_area(&self) -> f64 {
        self.surface_patches().map(|(_, a)| a).sum()
    }
}

#[derive(Clone, Copy, Debug)]
enum Patch {
    None,
    /// Full sphere when `hemisphere == 0`, otherwise the cap on that side.
    Sphere { radius: f64, center_z: f64, hemisphere: f64 },
    Tube { radius: f64, length: f64 },
    Disk { radius: f64, z: f64 },
    Face { axis: usize, offset: f64, extents: [f64; 3] },
}

impl Patch {
    /// Uniform sample on the patch: (point, outward unit normal), shape frame.
    fn sample(&self, rng: &mut SimRng) -> (Vec3, Vec3) {
        match *self {
            Patch::None => unreachable!(),
            Patch::Sphere { radius, center_z, hemisphere } => {
                let mut n = rng.unit_vector();
                if hemisphere != 0.0 && n.z * hemisphere < 0.0 {
                    n.z = -n.z;
                }
                (Vec3::new(0.0, 0.0, center_z) + n * radius, n)
            }
            Patch::Tube { radius, length } => {
                let phi = rng.uniform(0.0, core::f64::consts::TAU);
                let z = rng.uniform(-length * 0.5, length * 0.5);
                let n = Vec3::new(math::cos(phi), math::sin(phi), 0.0);
                (Vec3::new(n.x * radius, n.y * radius, z), n)
            }
            Patch::Disk { radius, z } => {
                let r = radius * math::sqrt(rng.unit());
                let phi = rng.uniform(0.0, core::f64::consts::TAU);
                let n = Vec3::new(0.0, 0.0, if z > 0.0 { 1.0 } else { -1.0 });
                (Vec3::new(r * math::cos(phi), r * math::sin(phi), z), n)
            }
            Patch::Face { axis, offset, extents } => {
                let mut c = [0.0; 3];
                let mut n = [0.0; 3];
                for (k, e) in extents.iter().enumerate() {
                    c[k] = if k == axis { offset } else { rng.uniform(-e * 0.5, e * 0.5) };
                }
                n[axis] = if offset > 0.0 { 1.0 } else { -1.0 };
                (Vec3::from_array(c), Vec3::from_array(n))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Label {
    Hand,
    Object,
    Background,
}

/// A placed primitive with the label its surface points receive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneBody {
    pub shape: PrimitiveShape,
    pub pose: Pose,
    pub label: Label,
}

impl SceneBody {
    pub fn new(shape: PrimitiveShape, pose: Pose, label: Label) -> Self {
        Self { shape, pose, label }
    }

    pub fn signed_distance(&self, world: Vec3) -> f64 {
        self.shape.signed_distance(self.pose.inverse_transform_point(world))
    }
}

/// Sphere-based hand. Sphere centers are offsets in the palm frame; the held
/// object sits at `grip_offset` relative to the palm.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HandModel {
    pub palm_center: Pose,
    pub finger_spheres: Vec<(Vec3, f64)>,
    pub grip_offset: Pose,
}

impl HandModel {
    pub fn validate(&self) -> Result<(), Error> {
        if self.finger_spheres.is_empty() || self.finger_spheres.iter().any(|&(_, r)| !(r > 0.0)) {
            return Err(Error::InvalidHand);
        }
        Ok(())
    }

    /// World pose of a held object.
    pub fn object_pose(&self) -> Pose {
        self.palm_center.compose(self.grip_offset)
    }

    pub fn bodies(&self) -> impl Iterator<Item = SceneBody> + '_ {
        self.finger_spheres.iter().map(move |&(offset, radius)| {
            SceneBody::new(
                PrimitiveShape::Sphere { radius },
                Pose::from_translation(self.palm_center.transform_point(offset)),
                Label::Hand,
            )
        })
    }
}

/// Points tagged hand / object / background, with optional surface normals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledPointCloud {
    pub points: Vec<Vec3>,
    pub labels: Vec<Label>,
    pub normals: Option<Vec<Vec3>>,
}

impl LabeledPointCloud {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_normals() -> Self {
        Self { normals: Some(Vec::new()), ..Self::default() }
    }

    /// Cloud with one label for all points and no normals.
    pub fn from_points(points: Vec<Vec3>, label: Label) -> Self {
        let labels = alloc::vec![label; points.len()];
        Self { points, labels, normals: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, point: Vec3, label: Label, normal: Option<Vec3>) {
        self.points.push(point);
        self.labels.push(label);
        match (&mut self.normals, normal) {
            (Some(ns), Some(n)) => ns.push(n),
            (Some(_), None) => self.normals = None,
            _ => {}
        }
    }

    pub fn normal(&self, i: usize) -> Option<Vec3> {
        self.normals.as_ref().map(|n| n[i])
    }

    /// Subset with `label`, order preserved.
    pub fn with_label(&self, label: Label) -> LabeledPointCloud {
        self.filter(|_, l| l == label)
    }

    pub fn filter(&self, mut keep: impl FnMut(Vec3, Label) -> bool) -> LabeledPointCloud {
        let mut out = LabeledPointCloud {
            normals: self.normals.as_ref().map(|_| Vec::new()),
            ..Self::default()
        };
        for i in 0..self.len() {
            if keep(self.points[i], self.labels[i]) {
                out.push(self.points[i], self.labels[i], self.normal(i));
            }
        }
        out
    }

    pub fn centroid(&self) -> Option<Vec3> {
        if self.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(Vec3::ZERO, |acc, &p| acc + p);
        Some(sum * (1.0 / self.len() as f64))
    }

    /// Rigidly moves every point (and normal).
    pub fn transformed(&self, pose: &Pose) -> LabeledPointCloud {
        LabeledPointCloud {
            points: self.points.iter().map(|&p| pose.transform_point(p)).collect(),
            labels: self.labels.clone(),
            normals: self.normals.as_ref().map(|ns| ns.iter().map(|&n| pose.q.rotate(n)).collect()),
        }
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Samples the camera-facing surface of every body at `density` points/m².
///
/// Each surface patch receives `round(area · density)` uniform samples; a
/// sample survives if its outward normal faces the camera and it does not lie
/// inside another body. Labels come from the body that produced the point.
pub fn synthesize_cloud(
    objects: &[SceneBody],
    hand: Option<&HandModel>,
    camera: &Pose,
    density: f64,
    rng: &mut SimRng,
) -> Result<LabeledPointCloud, Error> {
    if !(density > 0.0) {
        return Err(Error::InvalidDensity);
    }
    let mut bodies: Vec<SceneBody> = objects.to_vec();
    if let Some(h) = hand {
        bodies.extend(h.bodies());
    }
    let mut cloud = LabeledPointCloud::with_normals();
    for (bi, body) in bodies.iter().enumerate() {
        for (patch, area) in body.shape.surface_patches() {
            let n = math::round(area * density) as usize;
            for _ in 0..n {
                let (local, local_n) = patch.sample(rng);
                let p = body.pose.transform_point(local);
                let normal = body.pose.q.rotate(local_n);
                if normal.dot(p - camera.p) >= 0.0 {
                    continue;
                }
                let buried = bodies
                    .iter()
                    .enumerate()
                    .any(|(oi, other)| oi != bi && other.signed_distance(p) < -1e-9);
                if !buried {
                    cloud.push(p, body.label, Some(normal));
                }
            }
        }
    }
    Ok(cloud)
}

/// Samples the whole surface of one body (no visibility test), the ground
/// truth used when a closure is checked physically.
pub fn sample_surface(body: &SceneBody, density: f64, rng: &mut SimRng) -> Vec<Vec3> {
    let mut out = Vec::new();
    for (patch, area) in body.shape.surface_patches() {
        let n = math::round(area * density) as usize;
        for _ in 0..n {
            let (local, _) = patch.sample(rng);
            out.push(body.pose.transform_point(local));
        }
    }
    out
}

/// Closed-ball crop around the palm center; order and normals preserved.
pub fn crop_around_palm(cloud: &LabeledPointCloud, palm_center: Vec3, radius: f64) -> LabeledPointCloud {
    let r2 = radius * radius;
    cloud.filter(|p, _| p.distance_squared(palm_center) <= r2)
}

/// Swaps hand↔object labels independently with probability `flip_prob`.
pub fn apply_label_noise(cloud: &LabeledPointCloud, flip_prob: f64, rng: &mut SimRng) -> Result<LabeledPointCloud, Error> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::InvalidProbability);
    }
    let mut out = cloud.clone();
    for l in out.labels.iter_mut() {
        let swapped = match *l {
            Label::Hand => Label::Object,
            Label::Object => Label::Hand,
            Label::Background => continue,
        };
        if flip_prob >= 1.0 || (flip_prob > 0.0 && rng.bernoulli(flip_prob)) {
            *l = swapped;
        }
    }
    Ok(out)
}
