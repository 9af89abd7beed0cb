//! Shape definitions and the queries every driver relies on: analytic volume,
//! bounding box, point containment, ray intersection and tessellation.
//!
//! All lengths are millimetres and all angles radians. Solids are immutable
//! after construction.

mod contains;
mod montecarlo;
mod ray;
mod tessellate;

use std::fmt;

use thiserror::Error;

use crate::math::{Aabb, Transform3, Vec3};
use crate::real::Real;

pub use contains::Containment;
pub use montecarlo::{McEstimate, MIN_MC_SAMPLES};
pub use ray::{Crossing, Ray, RayHit, RayInterval};
pub use tessellate::{EdgeKind, Mesh, MeshEdge, MIN_SEGMENTS_PER_CIRCLE};

/// Maximum nesting depth of boolean operands.
pub const MAX_BOOLEAN_DEPTH: usize = 16;

/// Samples used when a subtraction's volume is requested through [`Solid::analytic_volume`].
pub const SUBTRACTION_VOLUME_SAMPLES: usize = 1_000_000;
const SUBTRACTION_VOLUME_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolidError {
    #[error("solid \"{solid}\": {reason}")]
    InvalidParameter { solid: String, reason: String },
    #[error("solid \"{solid}\": boolean nesting depth {depth} exceeds {max}")]
    NestingTooDeep { solid: String, depth: usize, max: usize },
    #[error("segments per circle {requested} is below the minimum of {min}")]
    TooFewSegments { requested: usize, min: usize },
    #[error("solid \"{0}\" has an empty bounding box")]
    EmptyBoundingBox(String),
    #[error("Monte-Carlo estimate needs at least {min} samples, got {requested}")]
    TooFewSamples { requested: usize, min: usize },
}

/// Azimuthal section `[start, start + delta]`, `0 < delta ≤ 2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiSection<T> {
    pub start: T,
    pub delta: T,
}

impl<T: Real> PhiSection<T> {
    pub fn full() -> Self {
        Self { start: T::zero(), delta: T::TAU() }
    }

    pub fn is_full(&self) -> bool {
        self.delta >= T::TAU()
    }

    pub fn end(&self) -> T {
        self.start + self.delta
    }

    fn validate(start: T, delta: T, name: &str) -> Result<Self, SolidError> {
        let tau = T::TAU();
        if !(delta > T::zero()) || delta > tau * (T::one() + T::lit(1e-12)) || !start.is_finite() {
            return Err(invalid(name, format!("delta_phi must lie in (0, 2π], got {delta}")));
        }
        let delta = if delta >= tau * (T::one() - T::lit(1e-12)) { tau } else { delta };
        Ok(Self { start, delta })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape<T> {
    Box {
        half_x: T,
        half_y: T,
        half_z: T,
    },
    Tube {
        r_min: T,
        r_max: T,
        half_z: T,
        phi: PhiSection<T>,
    },
    Cone {
        r_min1: T,
        r_max1: T,
        r_min2: T,
        r_max2: T,
        half_z: T,
        phi: PhiSection<T>,
    },
    Trd {
        half_x1: T,
        half_x2: T,
        half_y1: T,
        half_y2: T,
        half_z: T,
    },
    Sphere {
        r_min: T,
        r_max: T,
        phi: PhiSection<T>,
        theta_start: T,
        delta_theta: T,
    },
    /// `left − right`, with `right` placed in `left`'s frame by `transform`.
    Subtraction {
        left: Box<Solid<T>>,
        right: Box<Solid<T>>,
        transform: Transform3<T>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solid<T> {
    name: String,
    shape: Shape<T>,
}

fn invalid(name: &str, reason: impl Into<String>) -> SolidError {
    SolidError::InvalidParameter { solid: name.to_string(), reason: reason.into() }
}

fn positive<T: Real>(name: &str, what: &str, v: T) -> Result<(), SolidError> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{what} must be positive, got {v}")))
    }
}

fn radii<T: Real>(name: &str, r_min: T, r_max: T, allow_equal: bool) -> Result<(), SolidError> {
    let ok = r_min >= T::zero() && r_max.is_finite() && if allow_equal { r_max >= r_min } else { r_max > r_min };
    if ok {
        Ok(())
    } else {
        Err(invalid(name, format!("radii must satisfy r_max > r_min ≥ 0, got r_min={r_min}, r_max={r_max}")))
    }
}

impl<T: Real> Solid<T> {
    pub fn new_box(name: impl Into<String>, half_x: T, half_y: T, half_z: T) -> Result<Self, SolidError> {
        let name = name.into();
        positive(&name, "half_x", half_x)?;
        positive(&name, "half_y", half_y)?;
        positive(&name, "half_z", half_z)?;
        Ok(Self { name, shape: Shape::Box { half_x, half_y, half_z } })
    }

    pub fn new_tube(
        name: impl Into<String>,
        r_min: T,
        r_max: T,
        half_z: T,
        phi_start: T,
        delta_phi: T,
    ) -> Result<Self, SolidError> {
        let name = name.into();
        radii(&name, r_min, r_max, false)?;
        positive(&name, "half_z", half_z)?;
        let phi = PhiSection::validate(phi_start, delta_phi, &name)?;
        Ok(Self { name, shape: Shape::Tube { r_min, r_max, half_z, phi } })
    }

    /// Conical section; either end may close to an apex (`r_max == r_min` there).
    #[allow(clippy::too_many_arguments)]
    pub fn new_cone(
        name: impl Into<String>,
        r_min1: T,
        r_max1: T,
        r_min2: T,
        r_max2: T,
        half_z: T,
        phi_start: T,
        delta_phi: T,
    ) -> Result<Self, SolidError> {
        let name = name.into();
        radii(&name, r_min1, r_max1, true)?;
        radii(&name, r_min2, r_max2, true)?;
        if !(r_max1 > r_min1 || r_max2 > r_min2) {
            return Err(invalid(&name, "cone has zero wall thickness at both ends"));
        }
        positive(&name, "half_z", half_z)?;
        let phi = PhiSection::validate(phi_start, delta_phi, &name)?;
        Ok(Self { name, shape: Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } })
    }

    pub fn new_trd(
        name: impl Into<String>,
        half_x1: T,
        half_x2: T,
        half_y1: T,
        half_y2: T,
        half_z: T,
    ) -> Result<Self, SolidError> {
        let name = name.into();
        positive(&name, "half_x1", half_x1)?;
        positive(&name, "half_x2", half_x2)?;
        positive(&name, "half_y1", half_y1)?;
        positive(&name, "half_y2", half_y2)?;
        positive(&name, "half_z", half_z)?;
        Ok(Self { name, shape: Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new_sphere(
        name: impl Into<String>,
        r_min: T,
        r_max: T,
        phi_start: T,
        delta_phi: T,
        theta_start: T,
        delta_theta: T,
    ) -> Result<Self, SolidError> {
        let name = name.into();
        radii(&name, r_min, r_max, false)?;
        let phi = PhiSection::validate(phi_start, delta_phi, &name)?;
        let pi = T::PI();
        let slack = pi * T::lit(1e-12);
        if !(theta_start >= T::zero()) || theta_start >= pi || !(delta_theta > T::zero()) {
            return Err(invalid(&name, format!("theta section [{theta_start}, +{delta_theta}] is invalid")));
        }
        if theta_start + delta_theta > pi + slack {
            return Err(invalid(&name, "theta_start + delta_theta exceeds π"));
        }
        let delta_theta = delta_theta.min(pi - theta_start);
        Ok(Self { name, shape: Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } })
    }

    /// Full solid sphere of radius `r`.
    pub fn new_ball(name: impl Into<String>, r: T) -> Result<Self, SolidError> {
        Self::new_sphere(name, T::zero(), r, T::zero(), T::TAU(), T::zero(), T::PI())
    }

    pub fn new_subtraction(
        name: impl Into<String>,
        left: Solid<T>,
        right: Solid<T>,
        transform: Transform3<T>,
    ) -> Result<Self, SolidError> {
        let name = name.into();
        let depth = 1 + left.boolean_depth().max(right.boolean_depth());
        if depth > MAX_BOOLEAN_DEPTH {
            return Err(SolidError::NestingTooDeep { solid: name, depth, max: MAX_BOOLEAN_DEPTH });
        }
        Ok(Self { name, shape: Shape::Subtraction { left: Box::new(left), right: Box::new(right), transform } })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    /// Nesting depth of boolean operations; 0 for primitives.
    pub fn boolean_depth(&self) -> usize {
        match &self.shape {
            Shape::Subtraction { left, right, .. } => 1 + left.boolean_depth().max(right.boolean_depth()),
            _ => 0,
        }
    }

    /// Type name in the `G4`-style vocabulary used by tree dumps.
    pub fn type_name(&self) -> &'static str {
        match self.shape {
            Shape::Box { .. } => "G4Box",
            Shape::Tube { .. } => "G4Tubs",
            Shape::Cone { .. } => "G4Cons",
            Shape::Trd { .. } => "G4Trd",
            Shape::Sphere { .. } => "G4Sphere",
            Shape::Subtraction { .. } => "G4SubtractionSolid",
        }
    }

    /// Cubic volume. Exact for primitives; a seeded Monte-Carlo estimate for
    /// subtractions, so repeated calls return the same value.
    pub fn analytic_volume(&self) -> T {
        let third = T::one() / T::lit(3.0);
        match &self.shape {
            Shape::Box { half_x, half_y, half_z } => T::lit(8.0) * *half_x * *half_y * *half_z,
            Shape::Tube { r_min, r_max, half_z, phi } => phi.delta * *half_z * (*r_max * *r_max - *r_min * *r_min),
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
                let frustum = |a: T, b: T| a * a + a * b + b * b;
                phi.delta * *half_z * third * (frustum(*r_max1, *r_max2) - frustum(*r_min1, *r_min2))
            }
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
                T::lit(4.0)
                    * *half_z
                    * third
                    * (T::two() * *half_x1 * *half_y1
                        + *half_x1 * *half_y2
                        + *half_x2 * *half_y1
                        + T::two() * *half_x2 * *half_y2)
            }
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
                let cube = |r: T| r * r * r;
                phi.delta
                    * third
                    * (cube(*r_max) - cube(*r_min))
                    * (theta_start.cos() - (*theta_start + *delta_theta).cos())
            }
            Shape::Subtraction { .. } => self
                .mc_volume(SUBTRACTION_VOLUME_SAMPLES, SUBTRACTION_VOLUME_SEED)
                .map(|e| e.volume)
                .unwrap_or_else(|_| T::zero()),
        }
    }

    /// Conservative axis-aligned bounds in the solid's local frame; tight for
    /// full primitives.
    pub fn bounding_box(&self) -> Aabb<T> {
        let zero = T::zero();
        match &self.shape {
            Shape::Box { half_x, half_y, half_z } => Aabb::symmetric(Vec3::new(*half_x, *half_y, *half_z)),
            Shape::Tube { r_min, r_max, half_z, phi } => annular_sector_box(*r_min, *r_max, *half_z, phi),
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
                annular_sector_box(r_min1.min(*r_min2), r_max1.max(*r_max2), *half_z, phi)
            }
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
                Aabb::symmetric(Vec3::new(half_x1.max(*half_x2), half_y1.max(*half_y2), *half_z))
            }
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
                let (t1, t2) = (*theta_start, *theta_start + *delta_theta);
                let (c1, c2) = (t1.cos(), t2.cos());
                let z_max = if c1 >= zero { *r_max * c1 } else { *r_min * c1 };
                let z_min = if c2 <= zero { *r_max * c2 } else { *r_min * c2 };
                // Transverse extent: largest sinθ over the section.
                let half_pi = T::FRAC_PI_2();
                let s_max = if t1 <= half_pi && t2 >= half_pi { T::one() } else { t1.sin().max(t2.sin()) };
                let sector = annular_sector_box(zero, *r_max * s_max, T::one(), phi);
                Aabb::new(Vec3::new(sector.min.x, sector.min.y, z_min), Vec3::new(sector.max.x, sector.max.y, z_max))
            }
            Shape::Subtraction { left, .. } => left.bounding_box(),
        }
    }
}

/// Bounds of an annular sector `r ∈ [r_min, r_max]`, `φ ∈ phi`, `|z| ≤ half_z`.
fn annular_sector_box<T: Real>(r_min: T, r_max: T, half_z: T, phi: &PhiSection<T>) -> Aabb<T> {
    if phi.is_full() {
        return Aabb::symmetric(Vec3::new(r_max, r_max, half_z));
    }
    let mut b = Aabb::empty();
    let mut add = |r: T, a: T| b.include(Vec3::new(r * a.cos(), r * a.sin(), T::zero()));
    for a in [phi.start, phi.end()] {
        add(r_min, a);
        add(r_max, a);
    }
    // Axis directions crossed by the section reach r_max.
    let quarter = T::FRAC_PI_2();
    let first = (phi.start / quarter).ceil().to_i64().unwrap_or(0);
    let mut k = first;
    while T::lit(k as f64) * quarter <= phi.end() {
        add(r_max, T::lit(k as f64) * quarter);
        k += 1;
    }
    b.min.z = -half_z;
    b.max.z = half_z;
    b
}

impl<T: Real> fmt::Display for Solid<T> {
    /// Parameter dump, e.g. `G4Box "World": half_x=120 mm, half_y=120 mm, half_z=180 mm`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mm = |v: T| format!("{} mm", crate::units::format_g(v.to_f64_lossy(), 6));
        let deg = |v: T| format!("{} deg", crate::units::format_g(v.to_f64_lossy().to_degrees(), 6));
        write!(f, "{} \"{}\": ", self.type_name(), self.name)?;
        match &self.shape {
            Shape::Box { half_x, half_y, half_z } => {
                write!(f, "half_x={}, half_y={}, half_z={}", mm(*half_x), mm(*half_y), mm(*half_z))
            }
            Shape::Tube { r_min, r_max, half_z, phi } => write!(
                f,
                "r_min={}, r_max={}, half_z={}, phi_start={}, delta_phi={}",
                mm(*r_min),
                mm(*r_max),
                mm(*half_z),
                deg(phi.start),
                deg(phi.delta)
            ),
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => write!(
                f,
                "r_min1={}, r_max1={}, r_min2={}, r_max2={}, half_z={}, phi_start={}, delta_phi={}",
                mm(*r_min1),
                mm(*r_max1),
                mm(*r_min2),
                mm(*r_max2),
                mm(*half_z),
                deg(phi.start),
                deg(phi.delta)
            ),
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => write!(
                f,
                "half_x1={}, half_x2={}, half_y1={}, half_y2={}, half_z={}",
                mm(*half_x1),
                mm(*half_x2),
                mm(*half_y1),
                mm(*half_y2),
                mm(*half_z)
            ),
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => write!(
                f,
                "r_min={}, r_max={}, phi_start={}, delta_phi={}, theta_start={}, delta_theta={}",
                mm(*r_min),
                mm(*r_max),
                deg(phi.start),
                deg(phi.delta),
                deg(*theta_start),
                deg(*delta_theta)
            ),
            Shape::Subtraction { left, right, transform } => {
                let t = transform.translation;
                write!(f, "[{}] minus [{}] at ({}, {}, {})", left, right, mm(t.x), mm(t.y), mm(t.z))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{CM3, DEG};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn reference_volumes() {
        let world = Solid::new_box("World", 120.0, 120.0, 180.0).unwrap();
        assert!((world.analytic_volume() / CM3 - 20736.0).abs() < 1e-9);
        let cone = Solid::new_cone("Shape1", 0.0, 20.0, 0.0, 40.0, 30.0, 0.0, TAU).unwrap();
        assert!((cone.analytic_volume() / CM3 - 175.929).abs() < 5e-4);
        let trd = Solid::new_trd("Shape2", 60.0, 60.0, 50.0, 80.0, 30.0).unwrap();
        assert!((trd.analytic_volume() / CM3 - 936.0).abs() < 1e-9);
    }

    #[test]
    fn parameter_validation() {
        assert!(Solid::new_box("b", 0.0, 1.0, 1.0).is_err());
        assert!(Solid::new_tube("t", 2.0, 1.0, 1.0, 0.0, TAU).is_err());
        assert!(Solid::new_tube("t", 0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(Solid::new_tube("t", 0.0, 1.0, 1.0, 0.0, 7.0).is_err());
        assert!(Solid::new_sphere("s", 0.0, 1.0, 0.0, TAU, 0.5, 3.0).is_err());
        assert!(Solid::new_cone("c", 1.0, 1.0, 2.0, 2.0, 1.0, 0.0, TAU).is_err());
    }

    #[test]
    fn boolean_nesting_is_bounded() {
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let mut s = b.clone();
        for i in 0..MAX_BOOLEAN_DEPTH {
            s = Solid::new_subtraction(format!("s{i}"), s, b.clone(), Transform3::identity()).unwrap();
        }
        assert_eq!(s.boolean_depth(), MAX_BOOLEAN_DEPTH);
        let err = Solid::new_subtraction("deep", s, b, Transform3::identity()).unwrap_err();
        assert!(matches!(err, SolidError::NestingTooDeep { depth: 17, .. }));
    }

    #[test]
    fn bounding_boxes() {
        let b = Solid::new_box("b", 1.0, 2.0, 3.0).unwrap().bounding_box();
        assert_eq!(b, Aabb::symmetric(Vec3::new(1.0, 2.0, 3.0)));
        let t = Solid::new_tube("t", 0.0, 2.0, 5.0, 0.0, TAU).unwrap().bounding_box();
        assert_eq!(t, Aabb::symmetric(Vec3::new(2.0, 2.0, 5.0)));
        let a = Solid::new_box("a", 3.0, 3.0, 3.0).unwrap();
        let s = Solid::new_subtraction("s", a.clone(), b_box(), Transform3::identity()).unwrap();
        assert_eq!(s.bounding_box(), a.bounding_box());
        // Quarter tube in the first quadrant.
        let q = Solid::new_tube("q", 1.0, 2.0, 1.0, 0.0, 90.0 * DEG).unwrap().bounding_box();
        assert!((q.min.x - 0.0).abs() < 1e-12 && (q.max.x - 2.0).abs() < 1e-12);
        assert!((q.min.y - 0.0).abs() < 1e-12 && (q.max.y - 2.0).abs() < 1e-12);
        // Upper hemisphere.
        let h = Solid::new_sphere("h", 0.0, 1.0, 0.0, TAU, 0.0, PI / 2.0).unwrap().bounding_box();
        assert!((h.min.z).abs() < 1e-12 && (h.max.z - 1.0).abs() < 1e-12);
    }

    fn b_box() -> Solid<f64> {
        Solid::new_box("inner", 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn dump_lists_parameters() {
        let s = Solid::new_box("World", 120.0, 120.0, 180.0).unwrap();
        assert_eq!(s.to_string(), "G4Box \"World\": half_x=120 mm, half_y=120 mm, half_z=180 mm");
    }

    #[test]
    fn generic_over_f32() {
        let s: Solid<f32> = Solid::new_ball("s", 1.0).unwrap();
        assert!((s.analytic_volume() - 4.0 / 3.0 * std::f32::consts::PI).abs() < 1e-5);
    }
}
