//! Vectors, unit quaternions and rigid poses.
//!
//! Quaternions are stored canonicalized: the scalar part is non-negative, and
//! when it is exactly zero the first non-zero vector component is positive.
//! This picks one representative of the double cover so the weighted
//! quaternion distance is a function of the rotation, not of its encoding.
//!
//! Grasp frames use a fixed convention: local +Z is the approach axis, local
//! ±Y is the finger-closing axis, local X spans the finger width and the
//! origin sits midway between the fingertips.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::math;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }

    /// Unit vector in the same direction, or `None` for (near) zero input.
    pub fn try_normalize(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 1e-12 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn distance_squared(self, o: Vec3) -> f64 {
        (self - o).norm_squared()
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    pub fn max_abs_component(self) -> f64 {
        math::abs(self.x).max(math::abs(self.y)).max(math::abs(self.z))
    }

    /// Some unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(self) -> Vec3 {
        let helper = if math::abs(self.x) < 0.9 { Vec3::X } else { Vec3::Y };
        self.cross(helper).try_normalize().unwrap_or(Vec3::Z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Unit quaternion `w + xi + yj + zk`, always canonicalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat {
    x: f64,
    y: f64,
    z: f64,
    w: f64,
}

impl Default for Quat {
    fn default() -> Self {
        Quat::IDENTITY
    }
}

impl Quat {
    pub const IDENTITY: Quat = Quat { x: 0.0, y: 0.0, z: 0.0, w: 1.0 };

    /// Normalizes and canonicalizes `(x, y, z, w)`. Returns `None` when the
    /// input norm is too small to define a rotation. Input that is already
    /// unit to rounding is kept bit for bit, so serialized quaternions read
    /// back unchanged.
    pub fn try_new(x: f64, y: f64, z: f64, w: f64) -> Option<Quat> {
        let n = math::sqrt(x * x + y * y + z * z + w * w);
        if !(n > 1e-12) || !n.is_finite() {
            return None;
        }
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Some(Quat::canonical(x, y, z, w));
        }
        let inv = 1.0 / n;
        Some(Quat::canonical(x * inv, y * inv, z * inv, w * inv))
    }

    /// Like [`Quat::try_new`] but falls back to identity on degenerate input.
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Quat {
        Quat::try_new(x, y, z, w).unwrap_or(Quat::IDENTITY)
    }

    fn canonical(x: f64, y: f64, z: f64, w: f64) -> Quat {
        let flip = if w != 0.0 {
            w < 0.0
        } else if x != 0.0 {
            x < 0.0
        } else if y != 0.0 {
            y < 0.0
        } else {
            z < 0.0
        };
        if flip {
            Quat { x: -x, y: -y, z: -z, w: -w }
        } else {
            Quat { x, y, z, w }
        }
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        match axis.try_normalize() {
            Some(a) => {
                let (s, c) = (math::sin(angle * 0.5), math::cos(angle * 0.5));
                Quat::new(a.x * s, a.y * s, a.z * s, c)
            }
            None => Quat::IDENTITY,
        }
    }

    /// Rotation whose matrix has the given columns. The columns must form a
    /// right-handed orthonormal frame.
    pub fn from_axes(x_axis: Vec3, y_axis: Vec3, z_axis: Vec3) -> Quat {
        let (m00, m01, m02) = (x_axis.x, y_axis.x, z_axis.x);
        let (m10, m11, m12) = (x_axis.y, y_axis.y, z_axis.y);
        let (m20, m21, m22) = (x_axis.z, y_axis.z, z_axis.z);
        let trace = m00 + m11 + m22;
        if trace > 0.0 {
            let s = math::sqrt(trace + 1.0) * 2.0;
            Quat::new((m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s, 0.25 * s)
        } else if m00 > m11 && m00 > m22 {
            let s = math::sqrt(1.0 + m00 - m11 - m22) * 2.0;
            Quat::new(0.25 * s, (m01 + m10) / s, (m02 + m20) / s, (m21 - m12) / s)
        } else if m11 > m22 {
            let s = math::sqrt(1.0 + m11 - m00 - m22) * 2.0;
            Quat::new((m01 + m10) / s, 0.25 * s, (m12 + m21) / s, (m02 - m20) / s)
        } else {
            let s = math::sqrt(1.0 + m22 - m00 - m11) * 2.0;
            Quat::new((m02 + m20) / s, (m12 + m21) / s, 0.25 * s, (m10 - m01) / s)
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn w(&self) -> f64 {
        self.w
    }

    /// Components in `[x, y, z, w]` order.
    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn dot(self, o: Quat) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z + self.w * o.w
    }

    pub fn conjugate(self) -> Quat {
        Quat::canonical(-self.x, -self.y, -self.z, self.w)
    }

    /// Hamilton product `self ⊗ o`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Quat) -> Quat {
        let (a, b) = (self, o);
        Quat::new(
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        )
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    pub fn axis_x(self) -> Vec3 {
        self.rotate(Vec3::X)
    }
    pub fn axis_y(self) -> Vec3 {
        self.rotate(Vec3::Y)
    }
    pub fn axis_z(self) -> Vec3 {
        self.rotate(Vec3::Z)
    }

    /// Rotation angle in `[0, π]` of `self⁻¹ ⊗ o`, computed with `atan2` so
    /// it stays accurate for tiny angles.
    pub fn angle_to(self, o: Quat) -> f64 {
        let rel = self.conjugate().mul(o);
        let v = math::sqrt(rel.x * rel.x + rel.y * rel.y + rel.z * rel.z);
        2.0 * math::atan2(v, math::abs(rel.w))
    }

    /// Shortest-arc spherical interpolation; `t = 0` gives `self`, `t = 1`
    /// gives `o`.
    pub fn slerp(self, o: Quat, t: f64) -> Quat {
        let mut b = o.to_array();
        let mut d = self.dot(o);
        if d < 0.0 {
            d = -d;
            for c in b.iter_mut() {
                *c = -*c;
            }
        }
        let a = self.to_array();
        if d > 1.0 - 1e-12 {
            let mut r = [0.0; 4];
            for i in 0..4 {
                r[i] = a[i] + (b[i] - a[i]) * t;
            }
            return Quat::new(r[0], r[1], r[2], r[3]);
        }
        let theta = math::acos(d.min(1.0));
        let s = math::sin(theta);
        let wa = math::sin((1.0 - t) * theta) / s;
        let wb = math::sin(t * theta) / s;
        Quat::new(
            wa * a[0] + wb * b[0],
            wa * a[1] + wb * b[1],
            wa * a[2] + wb * b[2],
            wa * a[3] + wb * b[3],
        )
    }
}

/// A frame in the world: position in meters plus canonical orientation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub p: Vec3,
    pub q: Quat,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { p: Vec3::ZERO, q: Quat::IDENTITY };

    pub fn new(p: Vec3, q: Quat) -> Self {
        Self { p, q }
    }

    pub fn from_translation(p: Vec3) -> Self {
        Self { p, q: Quat::IDENTITY }
    }

    /// Builds a pose from `[px, py, pz, qx, qy, qz, qw]`.
    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            p: Vec3::new(a[0], a[1], a[2]),
            q: Quat::new(a[3], a[4], a[5], a[6]),
        }
    }

    /// `[px, py, pz, qx, qy, qz, qw]`, the serialized form used in traces.
    pub fn to_array(self) -> [f64; 7] {
        let q = self.q.to_array();
        [self.p.x, self.p.y, self.p.z, q[0], q[1], q[2], q[3]]
    }

    /// `self ∘ other`: `other` expressed in this frame, mapped to the world.
    pub fn compose(self, other: Pose) -> Pose {
        Pose {
            p: self.p + self.q.rotate(other.p),
            q: self.q.mul(other.q),
        }
    }

    pub fn inverse(self) -> Pose {
        let qi = self.q.conjugate();
        Pose { p: -qi.rotate(self.p), q: qi }
    }

    pub fn transform_point(self, v: Vec3) -> Vec3 {
        self.p + self.q.rotate(v)
    }

    /// World point expressed in this frame.
    pub fn inverse_transform_point(self, v: Vec3) -> Vec3 {
        self.q.conjugate().rotate(v - self.p)
    }

    pub fn axis_x(self) -> Vec3 {
        self.q.axis_x()
    }
    pub fn axis_y(self) -> Vec3 {
        self.q.axis_y()
    }
    pub fn axis_z(self) -> Vec3 {
        self.q.axis_z()
    }
}

/// Weighted quaternion distance `‖p₁ − p₂‖² + w_q (1 − ⟨q₁, q₂⟩)`.
pub fn pose_distance(a: &Pose, b: &Pose, w_q: f64) -> f64 {
    let rot = (1.0 - a.q.dot(b.q)).max(0.0);
    a.p.distance_squared(b.p) + w_q * rot
}

/// The same grasp approached with the gripper upside down: a half turn about
/// the local Z axis.
pub fn flip_about_grasp_z(g: &Pose) -> Pose {
    // q ⊗ (0, 0, 1, 0), written out so the result is exact.
    let q = g.q;
    Pose {
        p: g.p,
        q: Quat::canonical(q.y(), -q.x(), q.w(), -q.z()),
    }
}

/// Translates the pose by `delta` meters along its own +Z axis.
pub fn offset_along_grasp_z(g: &Pose, delta: f64) -> Pose {
    Pose {
        p: g.p + g.axis_z() * delta,
        q: g.q,
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::{Pose, Quat, Vec3};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for Pose {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            self.to_array().serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Pose {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let a = <[f64; 7]>::deserialize(d)?;
            let q = Quat::try_new(a[3], a[4], a[5], a[6]).ok_or_else(|| D::Error::custom("quaternion has zero norm"))?;
            Ok(Pose::new(Vec3::new(a[0], a[1], a[2]), q))
        }
    }

    impl Serialize for Vec3 {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            self.to_array().serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Vec3 {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let a = <[f64; 3]>::deserialize(d)?;
            Ok(Vec3::from_array(a))
        }
    }
}
