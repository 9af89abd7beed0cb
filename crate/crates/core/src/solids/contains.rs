use crate::math::Vec3;
use crate::real::Real;

use super::{PhiSection, Shape, Solid};

/// Point classification relative to a solid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Containment {
    Inside,
    Surface,
    Outside,
}

impl Containment {
    pub fn is_inside_or_surface(self) -> bool {
        !matches!(self, Containment::Outside)
    }
}

/// Approximate distance from a point to the boundary of the half-planes bounding
/// an azimuthal wedge: negative inside, positive outside, zero on the axis.
fn phi_measure<T: Real>(phi: &PhiSection<T>, x: T, y: T) -> T {
    if phi.is_full() {
        return -T::infinity();
    }
    let r = x.hypot(y);
    if r == T::zero() {
        return T::zero();
    }
    let tau = T::TAU();
    let rel = {
        let a = (y.atan2(x) - phi.start) % tau;
        if a < T::zero() {
            a + tau
        } else {
            a
        }
    };
    let plane_distance = |ang: T| if ang < T::FRAC_PI_2() { r * ang.sin() } else { r };
    if rel <= phi.delta {
        -plane_distance(rel).min(plane_distance(phi.delta - rel))
    } else {
        plane_distance(tau - rel).min(plane_distance(rel - phi.delta))
    }
}

/// Perpendicular-ish distance to a side surface `r = a + k z`, positive outside.
fn sloped<T: Real>(value: T, limit: T, slope: T) -> T {
    (value - limit) / (T::one() + slope * slope).sqrt()
}

impl<T: Real> Solid<T> {
    /// Signed boundary measure for primitives: negative inside, positive outside,
    /// approximately the distance to the nearest bounding surface near the boundary.
    fn boundary_measure(&self, p: Vec3<T>) -> T {
        let two = T::two();
        match self.shape() {
            Shape::Box { half_x, half_y, half_z } => {
                (p.x.abs() - *half_x).max(p.y.abs() - *half_y).max(p.z.abs() - *half_z)
            }
            Shape::Tube { r_min, r_max, half_z, phi } => {
                let r = p.x.hypot(p.y);
                let mut m = (p.z.abs() - *half_z).max(r - *r_max);
                if *r_min > T::zero() {
                    m = m.max(*r_min - r);
                }
                m.max(phi_measure(phi, p.x, p.y))
            }
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
                let r = p.x.hypot(p.y);
                let frac = (p.z + *half_z) / (two * *half_z);
                let k_max = (*r_max2 - *r_max1) / (two * *half_z);
                let k_min = (*r_min2 - *r_min1) / (two * *half_z);
                let outer = *r_max1 + (*r_max2 - *r_max1) * frac;
                let mut m = (p.z.abs() - *half_z).max(sloped(r, outer, k_max));
                if *r_min1 > T::zero() || *r_min2 > T::zero() {
                    let inner = *r_min1 + (*r_min2 - *r_min1) * frac;
                    m = m.max(sloped(inner, r, k_min));
                }
                m.max(phi_measure(phi, p.x, p.y))
            }
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
                let frac = (p.z + *half_z) / (two * *half_z);
                let kx = (*half_x2 - *half_x1) / (two * *half_z);
                let ky = (*half_y2 - *half_y1) / (two * *half_z);
                let hx = *half_x1 + (*half_x2 - *half_x1) * frac;
                let hy = *half_y1 + (*half_y2 - *half_y1) * frac;
                (p.z.abs() - *half_z).max(sloped(p.x.abs(), hx, kx)).max(sloped(p.y.abs(), hy, ky))
            }
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
                let r = p.norm();
                let mut m = r - *r_max;
                if *r_min > T::zero() {
                    m = m.max(*r_min - r);
                }
                m = m.max(phi_measure(phi, p.x, p.y));
                let theta_end = *theta_start + *delta_theta;
                let restricted_low = *theta_start > T::zero();
                let restricted_high = theta_end < T::PI();
                if restricted_low || restricted_high {
                    if r == T::zero() {
                        return m.max(T::zero());
                    }
                    let theta = (p.z / r).max(-T::one()).min(T::one()).acos();
                    let half_pi = T::FRAC_PI_2();
                    let arc = |a: T| r * a.max(-half_pi).min(half_pi).sin();
                    if restricted_low {
                        m = m.max(arc(*theta_start - theta));
                    }
                    if restricted_high {
                        m = m.max(arc(theta - theta_end));
                    }
                }
                m
            }
            Shape::Subtraction { .. } => unreachable!("booleans are classified structurally"),
        }
    }

    /// Classifies a point given in the solid's local frame. Points within
    /// [`Real::SURFACE_TOLERANCE`] of the boundary are on the surface.
    pub fn contains(&self, p: Vec3<T>) -> Containment {
        if let Shape::Subtraction { left, right, transform } = self.shape() {
            let a = left.contains(p);
            if a == Containment::Outside {
                return Containment::Outside;
            }
            let b = right.contains(transform.inverse().apply_point(p));
            return match (a, b) {
                (_, Containment::Inside) => Containment::Outside,
                (Containment::Inside, Containment::Outside) => Containment::Inside,
                _ => Containment::Surface,
            };
        }
        let m = self.boundary_measure(p);
        let tol = T::SURFACE_TOLERANCE;
        if m > tol {
            Containment::Outside
        } else if m < -tol {
            Containment::Inside
        } else {
            Containment::Surface
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Transform3;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn box_classification() {
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.contains(v(0.0, 0.0, 0.0)), Containment::Inside);
        assert_eq!(b.contains(v(1.0, 0.0, 0.0)), Containment::Surface);
        assert_eq!(b.contains(v(1.0 + 5e-10, 0.0, 0.0)), Containment::Surface);
        assert_eq!(b.contains(v(1.0 + 2e-9, 0.0, 0.0)), Containment::Outside);
    }

    #[test]
    fn subtraction_carves_right_operand() {
        let a = Solid::new_box("a", 3.0, 3.0, 3.0).unwrap();
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let s = Solid::new_subtraction("s", a, b, Transform3::translation(v(3.0, 3.0, 3.0))).unwrap();
        assert_eq!(s.contains(v(2.5, 2.5, 2.5)), Containment::Outside);
        assert_eq!(s.contains(v(0.0, 0.0, 0.0)), Containment::Inside);
        assert_eq!(s.contains(v(2.0, 2.5, 2.5)), Containment::Surface);
        assert_eq!(s.contains(v(3.5, 3.5, 3.5)), Containment::Outside);
    }

    #[test]
    fn tube_wedge_and_bore() {
        let t = Solid::new_tube("t", 1.0, 2.0, 1.0, 0.0, FRAC_PI_2).unwrap();
        assert_eq!(t.contains(v(1.0, 1.0, 0.0)), Containment::Inside);
        assert_eq!(t.contains(v(-1.0, 1.0, 0.0)), Containment::Outside);
        assert_eq!(t.contains(v(0.5, 0.5, 0.0)), Containment::Outside);
        assert_eq!(t.contains(v(1.5, 0.0, 0.0)), Containment::Surface);
        // Wedge wider than π.
        let w = Solid::new_tube("w", 0.0, 2.0, 1.0, 0.0, 1.5 * PI).unwrap();
        assert_eq!(w.contains(v(-1.0, -0.1, 0.0)), Containment::Inside);
        assert_eq!(w.contains(v(0.5, -0.5, 0.0)), Containment::Outside);
    }

    #[test]
    fn cone_follows_slant() {
        let c = Solid::new_cone("c", 0.0, 20.0, 0.0, 40.0, 30.0, 0.0, TAU).unwrap();
        assert_eq!(c.contains(v(25.0, 0.0, -29.0)), Containment::Outside);
        assert_eq!(c.contains(v(25.0, 0.0, 29.0)), Containment::Inside);
        assert_eq!(c.contains(v(30.0, 0.0, 0.0)), Containment::Surface);
    }

    #[test]
    fn sphere_theta_section() {
        let s = Solid::new_sphere("s", 0.0, 1.0, 0.0, TAU, PI / 4.0, PI / 2.0).unwrap();
        assert_eq!(s.contains(v(0.5, 0.0, 0.0)), Containment::Inside);
        assert_eq!(s.contains(v(0.0, 0.0, 0.5)), Containment::Outside);
        assert_eq!(s.contains(v(0.0, 0.0, -0.5)), Containment::Outside);
        assert_eq!(s.contains(v(0.0, 0.0, 0.0)), Containment::Surface);
    }

    #[test]
    fn box_symmetric_under_sign_flips() {
        let b = Solid::new_box("b", 1.0, 2.0, 3.0).unwrap();
        for p in [v(0.3, 1.9, -2.5), v(0.99, 0.0, 3.1), v(1.0, 2.0, 3.0)] {
            let c = b.contains(p);
            for s in [(-1.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, -1.0)] {
                assert_eq!(b.contains(v(p.x * s.0, p.y * s.1, p.z * s.2)), c);
            }
        }
    }
}
