//! Exact ray/solid intersection.
//!
//! Each primitive is an intersection of simple regions (slabs, half-spaces,
//! quadric interiors and their complements). Along a ray every region is a
//! sorted list of parameter intervals, so the solid is obtained with interval
//! set algebra; subtractions reuse the same algebra on their operands.

use crate::math::{Transform3, Vec3};
use crate::real::Real;

use super::{PhiSection, Shape, Solid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray<T> {
    pub origin: Vec3<T>,
    pub direction: Vec3<T>,
}

impl<T: Real> Ray<T> {
    /// Builds a ray, normalising `direction`.
    pub fn new(origin: Vec3<T>, direction: Vec3<T>) -> Self {
        Self { origin, direction: direction.normalized() }
    }

    pub fn at(&self, t: T) -> Vec3<T> {
        self.origin + self.direction * t
    }

    pub fn transformed(&self, t: &Transform3<T>) -> Self {
        Self { origin: t.apply_point(self.origin), direction: t.apply_vector(self.direction) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayHit<T> {
    pub distance: T,
    /// Outward unit normal of the solid at the hit point.
    pub surface_normal: Vec3<T>,
    pub entering: bool,
}

/// Boundary crossing: ray parameter and the outward normal of the region there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing<T> {
    pub t: T,
    pub normal: Vec3<T>,
}

/// Parameter interval along a ray that lies inside a solid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayInterval<T> {
    pub enter: Crossing<T>,
    pub exit: Crossing<T>,
}

type Spans<T> = Vec<RayInterval<T>>;

fn crossing<T: Real>(t: T, normal: Vec3<T>) -> Crossing<T> {
    Crossing { t, normal }
}

fn whole<T: Real>() -> Spans<T> {
    vec![RayInterval { enter: crossing(T::neg_infinity(), Vec3::zero()), exit: crossing(T::infinity(), Vec3::zero()) }]
}

fn intersect<T: Real>(a: &[RayInterval<T>], b: &[RayInterval<T>]) -> Spans<T> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let enter = if a[i].enter.t >= b[j].enter.t { a[i].enter } else { b[j].enter };
        let exit = if a[i].exit.t <= b[j].exit.t { a[i].exit } else { b[j].exit };
        if enter.t < exit.t {
            out.push(RayInterval { enter, exit });
        }
        if a[i].exit.t <= b[j].exit.t {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn complement<T: Real>(a: &[RayInterval<T>]) -> Spans<T> {
    let mut out = Vec::new();
    let mut enter = crossing(T::neg_infinity(), Vec3::zero());
    for s in a {
        if s.enter.t > enter.t {
            out.push(RayInterval { enter, exit: crossing(s.enter.t, -s.enter.normal) });
        }
        enter = crossing(s.exit.t, -s.exit.normal);
    }
    if enter.t < T::infinity() {
        out.push(RayInterval { enter, exit: crossing(T::infinity(), Vec3::zero()) });
    }
    out
}

fn union<T: Real>(a: &[RayInterval<T>], b: &[RayInterval<T>]) -> Spans<T> {
    complement(&intersect(&complement(a), &complement(b)))
}

fn subtract<T: Real>(a: &[RayInterval<T>], b: &[RayInterval<T>]) -> Spans<T> {
    intersect(a, &complement(b))
}

/// `{ p : normal·p ≤ offset }` with `normal` the unit outward normal.
fn half_space<T: Real>(ray: &Ray<T>, normal: Vec3<T>, offset: T) -> Spans<T> {
    let denom = normal.dot(ray.direction);
    let dist = offset - normal.dot(ray.origin);
    if denom == T::zero() {
        return if dist >= T::zero() { whole() } else { Vec::new() };
    }
    let t = dist / denom;
    if denom > T::zero() {
        vec![RayInterval { enter: crossing(T::neg_infinity(), Vec3::zero()), exit: crossing(t, normal) }]
    } else {
        vec![RayInterval { enter: crossing(t, normal), exit: crossing(T::infinity(), Vec3::zero()) }]
    }
}

/// `|p·axis| ≤ half`.
fn slab<T: Real>(ray: &Ray<T>, axis: Vec3<T>, half: T) -> Spans<T> {
    intersect(&half_space(ray, axis, half), &half_space(ray, -axis, half))
}

/// `{ f ≤ 0 }` for a quadratic `f(o + t d) = a t² + b t + c`; `gradient`
/// evaluates the (unnormalised) outward normal at a point.
fn quadric<T: Real>(ray: &Ray<T>, a: T, b: T, c: T, gradient: impl Fn(Vec3<T>) -> Vec3<T>) -> Spans<T> {
    let at = |t: T| crossing(t, gradient(ray.at(t)).normalized());
    let neg_inf = crossing(T::neg_infinity(), Vec3::zero());
    let pos_inf = crossing(T::infinity(), Vec3::zero());
    if a == T::zero() {
        if b == T::zero() {
            return if c <= T::zero() { whole() } else { Vec::new() };
        }
        let t = -c / b;
        return if b > T::zero() {
            vec![RayInterval { enter: neg_inf, exit: at(t) }]
        } else {
            vec![RayInterval { enter: at(t), exit: pos_inf }]
        };
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc <= T::zero() {
        return if a > T::zero() { Vec::new() } else { whole() };
    }
    let sq = disc.sqrt();
    let q = -T::half() * (b + if b >= T::zero() { sq } else { -sq });
    let (mut r1, mut r2) = (q / a, c / q);
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    if a > T::zero() {
        vec![RayInterval { enter: at(r1), exit: at(r2) }]
    } else {
        vec![RayInterval { enter: neg_inf, exit: at(r1) }, RayInterval { enter: at(r2), exit: pos_inf }]
    }
}

/// Infinite cylinder `x² + y² ≤ r²`.
fn cylinder<T: Real>(ray: &Ray<T>, r: T) -> Spans<T> {
    let (o, d) = (ray.origin, ray.direction);
    let a = d.x * d.x + d.y * d.y;
    let b = T::two() * (o.x * d.x + o.y * d.y);
    let c = o.x * o.x + o.y * o.y - r * r;
    quadric(ray, a, b, c, |p| Vec3::new(p.x, p.y, T::zero()))
}

/// Solid cone `x² + y² ≤ (r0 + k z)²` restricted to `r0 + k z ≥ 0`.
fn cone_region<T: Real>(ray: &Ray<T>, r0: T, k: T) -> Spans<T> {
    if k == T::zero() {
        return if r0 > T::zero() { cylinder(ray, r0) } else { Vec::new() };
    }
    let (o, d) = (ray.origin, ray.direction);
    let ro = r0 + k * o.z;
    let a = d.x * d.x + d.y * d.y - k * k * d.z * d.z;
    let b = T::two() * (o.x * d.x + o.y * d.y - k * ro * d.z);
    let c = o.x * o.x + o.y * o.y - ro * ro;
    let nappe = quadric(ray, a, b, c, |p| Vec3::new(p.x, p.y, -k * (r0 + k * p.z)));
    // r0 + k z ≥ 0  ⇔  −sign(k)·z ≤ r0/|k|
    let side = half_space(ray, Vec3::new(T::zero(), T::zero(), -k.signum()), r0 / k.abs());
    intersect(&nappe, &side)
}

fn ball<T: Real>(ray: &Ray<T>, r: T) -> Spans<T> {
    let (o, d) = (ray.origin, ray.direction);
    quadric(ray, d.norm_squared(), T::two() * o.dot(d), o.norm_squared() - r * r, |p| p)
}

fn wedge<T: Real>(ray: &Ray<T>, phi: &PhiSection<T>) -> Option<Spans<T>> {
    if phi.is_full() {
        return None;
    }
    let (s, e) = (phi.start, phi.end());
    let start_plane = half_space(ray, Vec3::new(s.sin(), -s.cos(), T::zero()), T::zero());
    let end_plane = half_space(ray, Vec3::new(-e.sin(), e.cos(), T::zero()), T::zero());
    Some(if phi.delta <= T::PI() { intersect(&start_plane, &end_plane) } else { union(&start_plane, &end_plane) })
}

/// Points with polar angle `θ ≤ alpha` (a cone about +z, or a half-space at π/2).
fn polar_cap<T: Real>(ray: &Ray<T>, alpha: T) -> Spans<T> {
    let half_pi = T::FRAC_PI_2();
    let up = Vec3::new(T::zero(), T::zero(), -T::one());
    if (alpha - half_pi).abs() <= T::epsilon() * T::lit(16.0) {
        return half_space(ray, up, T::zero());
    }
    // Cone of half-angle `beta` opening towards `sign`·z.
    let cone = |beta: T, sign: T| {
        let k = beta.tan().powi(2);
        let (o, d) = (ray.origin, ray.direction);
        let a = d.x * d.x + d.y * d.y - k * d.z * d.z;
        let b = T::two() * (o.x * d.x + o.y * d.y - k * o.z * d.z);
        let c = o.x * o.x + o.y * o.y - k * o.z * o.z;
        let nappe = quadric(ray, a, b, c, |p| Vec3::new(p.x, p.y, -k * p.z));
        let side = half_space(ray, Vec3::new(T::zero(), T::zero(), -sign), T::zero());
        intersect(&nappe, &side)
    };
    if alpha < half_pi {
        cone(alpha, T::one())
    } else {
        complement(&cone(T::PI() - alpha, -T::one()))
    }
}

impl<T: Real> Solid<T> {
    /// All parameter intervals along `ray` (local frame) that lie inside the solid.
    pub fn ray_intervals(&self, ray: &Ray<T>) -> Vec<RayInterval<T>> {
        let z_axis = Vec3::unit_z();
        let two = T::two();
        let mut spans = match self.shape() {
            Shape::Box { half_x, half_y, half_z } => {
                let xy = intersect(&slab(ray, Vec3::unit_x(), *half_x), &slab(ray, Vec3::unit_y(), *half_y));
                intersect(&xy, &slab(ray, z_axis, *half_z))
            }
            Shape::Tube { r_min, r_max, half_z, phi } => {
                let mut s = intersect(&slab(ray, z_axis, *half_z), &cylinder(ray, *r_max));
                if *r_min > T::zero() {
                    s = subtract(&s, &cylinder(ray, *r_min));
                }
                if let Some(w) = wedge(ray, phi) {
                    s = intersect(&s, &w);
                }
                s
            }
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
                let k_max = (*r_max2 - *r_max1) / (two * *half_z);
                let k_min = (*r_min2 - *r_min1) / (two * *half_z);
                let mid = |a: T, b: T| (a + b) * T::half();
                let outer = cone_region(ray, mid(*r_max1, *r_max2), k_max);
                let mut s = intersect(&slab(ray, z_axis, *half_z), &outer);
                if *r_min1 > T::zero() || *r_min2 > T::zero() {
                    s = subtract(&s, &cone_region(ray, mid(*r_min1, *r_min2), k_min));
                }
                if let Some(w) = wedge(ray, phi) {
                    s = intersect(&s, &w);
                }
                s
            }
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
                let mut s = slab(ray, z_axis, *half_z);
                let kx = (*half_x2 - *half_x1) / (two * *half_z);
                let ky = (*half_y2 - *half_y1) / (two * *half_z);
                let ax = (*half_x1 + *half_x2) * T::half();
                let ay = (*half_y1 + *half_y2) * T::half();
                let o = T::one();
                let z = T::zero();
                // ±x ≤ ax + kx z  ⇔  (±1, 0, −kx)·p ≤ ax
                for (n, off) in [
                    (Vec3::new(o, z, -kx), ax),
                    (Vec3::new(-o, z, -kx), ax),
                    (Vec3::new(z, o, -ky), ay),
                    (Vec3::new(z, -o, -ky), ay),
                ] {
                    let len = n.norm();
                    s = intersect(&s, &half_space(ray, n / len, off / len));
                }
                s
            }
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
                let mut s = ball(ray, *r_max);
                if *r_min > T::zero() {
                    s = subtract(&s, &ball(ray, *r_min));
                }
                if let Some(w) = wedge(ray, phi) {
                    s = intersect(&s, &w);
                }
                let theta_end = *theta_start + *delta_theta;
                if theta_end < T::PI() {
                    s = intersect(&s, &polar_cap(ray, theta_end));
                }
                if *theta_start > T::zero() {
                    s = subtract(&s, &polar_cap(ray, *theta_start));
                }
                s
            }
            Shape::Subtraction { left, right, transform } => {
                let a = left.ray_intervals(ray);
                if a.is_empty() {
                    return a;
                }
                let local = ray.transformed(&transform.inverse());
                let mut b = right.ray_intervals(&local);
                for s in &mut b {
                    s.enter.normal = transform.apply_vector(s.enter.normal);
                    s.exit.normal = transform.apply_vector(s.exit.normal);
                }
                subtract(&a, &b)
            }
        };
        spans.retain(|s| s.exit.t > s.enter.t);
        spans
    }

    /// Nearest boundary crossing at distance > [`Real::RAY_TOLERANCE`].
    /// A ray starting on a surface does not report that surface.
    pub fn ray_intersect(&self, ray: &Ray<T>) -> Option<RayHit<T>> {
        let tol = T::RAY_TOLERANCE;
        for s in self.ray_intervals(ray) {
            for (c, entering) in [(s.enter, true), (s.exit, false)] {
                if c.t > tol && c.t.is_finite() {
                    return Some(RayHit { distance: c.t, surface_normal: c.normal, entering });
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solids::Containment;
    use std::f64::consts::{PI, TAU};

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn box_front_face() {
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let hit = b.ray_intersect(&Ray::new(v(0.0, 0.0, -10.0), v(0.0, 0.0, 1.0))).unwrap();
        assert_eq!(hit.distance, 9.0);
        assert_eq!(hit.surface_normal, v(0.0, 0.0, -1.0));
        assert!(hit.entering);
    }

    #[test]
    fn sphere_miss() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        assert!(s.ray_intersect(&Ray::new(v(0.0, 2.0, -10.0), v(0.0, 0.0, 1.0))).is_none());
    }

    #[test]
    fn starting_on_surface_reports_exit() {
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let hit = b.ray_intersect(&Ray::new(v(0.0, 0.0, -1.0), v(0.0, 0.0, 1.0))).unwrap();
        assert_eq!(hit.distance, 2.0);
        assert!(!hit.entering);
        assert_eq!(hit.surface_normal, v(0.0, 0.0, 1.0));
    }

    #[test]
    fn hollow_tube_inner_wall() {
        let t = Solid::new_tube("t", 1.0, 2.0, 1.0, 0.0, TAU).unwrap();
        let ray = Ray::new(v(-5.0, 0.0, 0.0), v(1.0, 0.0, 0.0));
        let spans = t.ray_intervals(&ray);
        assert_eq!(spans.len(), 2);
        assert!((spans[0].exit.t - 4.0).abs() < 1e-12);
        // Exiting into the bore: outward normal points towards the axis.
        assert!((spans[0].exit.normal - v(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((spans[1].enter.t - 6.0).abs() < 1e-12);
        assert!((spans[1].enter.normal - v(-1.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn subtraction_exposes_carved_face() {
        let a = Solid::new_box("a", 3.0, 3.0, 3.0).unwrap();
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let s = Solid::new_subtraction("s", a, b, Transform3::translation(v(3.0, 3.0, 3.0))).unwrap();
        let hit = s.ray_intersect(&Ray::new(v(2.5, 2.5, 10.0), v(0.0, 0.0, -1.0))).unwrap();
        assert!((hit.distance - 8.0).abs() < 1e-12);
        assert!((hit.surface_normal - v(0.0, 0.0, 1.0)).norm() < 1e-12);
        let inside = hit.distance + 1e-7;
        let p = Ray::new(v(2.5, 2.5, 10.0), v(0.0, 0.0, -1.0)).at(inside);
        assert_ne!(s.contains(p), Containment::Outside);
    }

    #[test]
    fn cone_apex_and_slant() {
        let c = Solid::new_cone("c", 0.0, 2.0, 0.0, 0.0, 1.0, 0.0, TAU).unwrap();
        // Along the axis from below: bottom cap at z=-1.
        let hit = c.ray_intersect(&Ray::new(v(0.0, 0.0, -5.0), v(0.0, 0.0, 1.0))).unwrap();
        assert!((hit.distance - 4.0).abs() < 1e-12);
        // Horizontal ray at z=0 meets the slant at r=1.
        let hit = c.ray_intersect(&Ray::new(v(-5.0, 0.0, 0.0), v(1.0, 0.0, 0.0))).unwrap();
        assert!((hit.distance - 4.0).abs() < 1e-12);
        let n = hit.surface_normal;
        assert!(n.x < 0.0 && n.z > 0.0);
    }

    #[test]
    fn wedge_wider_than_pi() {
        let t = Solid::new_tube("t", 0.0, 1.0, 1.0, 0.0, 1.5 * PI).unwrap();
        // Along −y at x=0.5: wedge excludes the fourth quadrant (x>0, y<0).
        let ray = Ray::new(v(0.5, 5.0, 0.0), v(0.0, -1.0, 0.0));
        let spans = t.ray_intervals(&ray);
        assert_eq!(spans.len(), 1);
        let exit = spans[0].exit;
        assert!((exit.t - 5.0).abs() < 1e-12);
        assert!((exit.normal - v(0.0, -1.0, 0.0)).norm() < 1e-12);
    }
}
