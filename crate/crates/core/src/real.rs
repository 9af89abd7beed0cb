//! Scalar abstraction for the geometry kernel.
//!
//! Solids, meshes and ray queries are written once over [`Real`] and used with
//! `f64` by the rest of the crate. `f32` works for rendering-grade queries, with
//! correspondingly looser tolerances.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the geometry kernel.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Half-width of the band around a surface classified as "on" the surface (mm).
    const SURFACE_TOLERANCE: Self;
    /// Minimum ray parameter accepted as a hit; rays starting on a surface skip it (mm).
    const RAY_TOLERANCE: Self;
    /// Allowed deviation of a tessellated face from its best-fit plane (mm).
    const PLANARITY_TOLERANCE: Self;

    /// Converts an `f64` literal. Panics only if the type cannot represent finite `f64`s.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f64 {
    const SURFACE_TOLERANCE: Self = 1e-9;
    const RAY_TOLERANCE: Self = 1e-7;
    const PLANARITY_TOLERANCE: Self = 1e-6;
}

impl Real for f32 {
    const SURFACE_TOLERANCE: Self = 1e-5;
    const RAY_TOLERANCE: Self = 1e-4;
    const PLANARITY_TOLERANCE: Self = 1e-3;
}
