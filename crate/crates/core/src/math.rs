//! Small fixed-size linear algebra: 3-vectors, 3×3 matrices, rigid transforms
//! and axis-aligned boxes.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::real::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self::new(T::lit(v[0]), T::lit(v[1]), T::lit(v[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.x.to_f64_lossy(), self.y.to_f64_lossy(), self.z.to_f64_lossy()]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; the zero vector stays zero.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            self
        }
    }

    pub fn component_mul(self, o: Self) -> Self {
        Self::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    pub fn min(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn abs(self) -> Self {
        Self::new(self.x.abs(), self.y.abs(), self.z.abs())
    }

    pub fn max_abs_component(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Replaces negative zeros by positive ones so that equal points have equal bits.
    pub fn canonical(self) -> Self {
        Self::new(self.x + T::zero(), self.y + T::zero(), self.z + T::zero())
    }

    pub fn axis(self, axis: Axis) -> T {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit<T: Real>(self) -> Vec3<T> {
        match self {
            Axis::X => Vec3::unit_x(),
            Axis::Y => Vec3::unit_y(),
            Axis::Z => Vec3::unit_z(),
        }
    }
}

/// Row-major 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T> {
    pub rows: [Vec3<T>; 3],
}

impl<T: Real> Mat3<T> {
    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self { rows: [r0, r1, r2] }
    }

    pub fn identity() -> Self {
        Self::from_rows(Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z())
    }

    pub fn rotation_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self::from_rows(Vec3::new(o, z, z), Vec3::new(z, c, -s), Vec3::new(z, s, c))
    }

    pub fn rotation_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self::from_rows(Vec3::new(c, z, s), Vec3::new(z, o, z), Vec3::new(-s, z, c))
    }

    pub fn rotation_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self::from_rows(Vec3::new(c, -s, z), Vec3::new(s, c, z), Vec3::new(z, z, o))
    }

    pub fn column(&self, i: usize) -> Vec3<T> {
        let pick = |v: Vec3<T>| match i {
            0 => v.x,
            1 => v.y,
            _ => v.z,
        };
        Vec3::new(pick(self.rows[0]), pick(self.rows[1]), pick(self.rows[2]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_rows(self.column(0), self.column(1), self.column(2))
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let c = [o.column(0), o.column(1), o.column(2)];
        let row = |r: Vec3<T>| Vec3::new(r.dot(c[0]), r.dot(c[1]), r.dot(c[2]));
        Self::from_rows(row(self.rows[0]), row(self.rows[1]), row(self.rows[2]))
    }

    pub fn determinant(&self) -> T {
        self.rows[0].dot(self.rows[1].cross(self.rows[2]))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl<T> Index<usize> for Mat3<T> {
    type Output = Vec3<T>;
    fn index(&self, i: usize) -> &Vec3<T> {
        &self.rows[i]
    }
}

/// Rigid transform `p ↦ R·p + t`, mapping a local frame into its parent frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transform3<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Default for Transform3<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Transform3<T> {
    pub fn identity() -> Self {
        Self { rotation: Mat3::identity(), translation: Vec3::zero() }
    }

    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Self {
        Self { rotation, translation }
    }

    pub fn translation(t: Vec3<T>) -> Self {
        Self { rotation: Mat3::identity(), translation: t }
    }

    pub fn apply_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    pub fn apply_vector(&self, v: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(v)
    }

    /// `self ∘ inner`: applies `inner` first, then `self`.
    pub fn compose(&self, inner: &Self) -> Self {
        Self { rotation: self.rotation.mul_mat(&inner.rotation), translation: self.apply_point(inner.translation) }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self { rotation: rt, translation: -rt.mul_vec(self.translation) }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation.is_identity() && self.translation == Vec3::zero()
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Vec3<T>, max: Vec3<T>) -> Self {
        Self { min, max }
    }

    pub fn symmetric(half: Vec3<T>) -> Self {
        Self { min: -half, max: half }
    }

    /// Box that contains nothing; the identity for [`Aabb::union`].
    pub fn empty() -> Self {
        let inf = T::infinity();
        Self { min: Vec3::new(inf, inf, inf), max: Vec3::new(-inf, -inf, -inf) }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn size(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn centre(&self) -> Vec3<T> {
        (self.min + self.max) * T::half()
    }

    pub fn volume(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let s = self.size();
        s.x * s.y * s.z
    }

    pub fn union(&self, o: &Self) -> Self {
        Self { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    pub fn include(&mut self, p: Vec3<T>) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    pub fn corners(&self) -> [Vec3<T>; 8] {
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

    /// Bounding box of this box after a rigid transform.
    pub fn transformed(&self, t: &Transform3<T>) -> Self {
        let mut out = Self::empty();
        for c in self.corners() {
            out.include(t.apply_point(c));
        }
        out
    }

    pub fn contains_box(&self, o: &Self, slack: T) -> bool {
        o.min.x >= self.min.x - slack
            && o.min.y >= self.min.y - slack
            && o.min.z >= self.min.z - slack
            && o.max.x <= self.max.x + slack
            && o.max.y <= self.max.y + slack
            && o.max.z <= self.max.z + slack
    }

    pub fn bounding_radius(&self) -> T {
        self.size().norm() * T::half()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_then_inverse_is_identity() {
        let a = Transform3::new(Mat3::rotation_x(0.3f64), Vec3::new(1.0, 2.0, 3.0));
        let b = Transform3::new(Mat3::rotation_z(-1.1f64), Vec3::new(-4.0, 0.5, 7.0));
        let ab = a.compose(&b);
        let p = Vec3::new(0.25, -3.0, 9.0);
        let direct = a.apply_point(b.apply_point(p));
        assert!((ab.apply_point(p) - direct).norm() < 1e-12);
        assert!((ab.inverse().apply_point(direct) - p).norm() < 1e-12);
    }

    #[test]
    fn rotations_are_right_handed() {
        let r = Mat3::rotation_z(std::f64::consts::FRAC_PI_2);
        let v = r.mul_vec(Vec3::unit_x());
        assert!((v - Vec3::unit_y()).norm() < 1e-15);
        assert!((Mat3::rotation_y(0.7f64).determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transformed_box_contains_rotated_corners() {
        let b = Aabb::symmetric(Vec3::new(1.0f64, 2.0, 3.0));
        let t = Transform3::new(Mat3::rotation_y(0.4), Vec3::new(5.0, 0.0, 0.0));
        let tb = b.transformed(&t);
        for c in b.corners() {
            let p = t.apply_point(c);
            assert!(tb.contains_box(&Aabb::new(p, p), 1e-12));
        }
    }
}
