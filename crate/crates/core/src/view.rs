//! View parameters shared by every viewer, and the camera derived from them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::colour::Colour;
use crate::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ViewError {
    #[error("viewpoint and up vector are parallel")]
    ParallelUpVector,
    #[error("direction vector has zero length")]
    ZeroVector,
    #[error("zoom must be positive, got {0}")]
    BadZoom(f64),
    #[error("bad window geometry \"{0}\", expected WxH[±X±Y]")]
    BadWindow(String),
    #[error("segments per circle must be at least {min}, got {got}")]
    TooFewSegments { got: usize, min: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrawingStyle {
    Wireframe,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projection {
    Orthographic,
    /// Full vertical field of view in radians.
    Perspective {
        fov: f64,
    },
}

/// Window size and anchor, X11 style: `600x600-0+0` is 600×600 pixels touching
/// the right and top edges of the screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WindowGeometry {
    pub width: u32,
    pub height: u32,
    /// Offset from the left edge, or from the right edge when negative-signed.
    pub x: Option<(bool, u32)>,
    pub y: Option<(bool, u32)>,
}

impl Default for WindowGeometry {
    fn default() -> Self {
        Self { width: 600, height: 600, x: None, y: None }
    }
}

impl WindowGeometry {
    /// True when anchored to the right edge (`-X`).
    pub fn anchored_right(&self) -> bool {
        matches!(self.x, Some((true, _)))
    }

    /// True when anchored to the top edge (`+Y`).
    pub fn anchored_top(&self) -> bool {
        matches!(self.y, Some((false, _)))
    }
}

impl FromStr for WindowGeometry {
    type Err = ViewError;

    fn from_str(s: &str) -> Result<Self, ViewError> {
        let bad = || ViewError::BadWindow(s.to_string());
        let s_trim = s.trim();
        if s_trim.is_empty() {
            return Ok(Self::default());
        }
        let split = s_trim.find(['+', '-']).unwrap_or(s_trim.len());
        let (size, offsets) = s_trim.split_at(split);
        let (w, h) = size.split_once(['x', 'X']).ok_or_else(bad)?;
        let width: u32 = w.parse().map_err(|_| bad())?;
        let height: u32 = h.parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        let mut parts = Vec::new();
        let mut rest = offsets;
        while !rest.is_empty() {
            let negative = rest.starts_with('-');
            let body = &rest[1..];
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let value: u32 = body[..end].parse().map_err(|_| bad())?;
            parts.push((negative, value));
            rest = &body[end..];
        }
        match parts.as_slice() {
            [] => Ok(Self { width, height, x: None, y: None }),
            [x, y] => Ok(Self { width, height, x: Some(*x), y: Some(*y) }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for WindowGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)?;
        for (neg, v) in [self.x, self.y].into_iter().flatten() {
            write!(f, "{}{}", if neg { '-' } else { '+' }, v)?;
        }
        Ok(())
    }
}

/// Everything a viewer needs to turn a scene into a picture.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewParameters {
    /// Unit vector from the target towards the camera.
    pub viewpoint: Vec3,
    pub up: Vec3,
    /// Unit vector from the target towards the light.
    pub light: Vec3,
    pub zoom: f64,
    pub style: DrawingStyle,
    pub auxiliary_edges: bool,
    pub hidden_marker: bool,
    pub segments_per_circle: usize,
    pub window: WindowGeometry,
    pub projection: Projection,
    pub culling_invisible: bool,
    pub background: Colour,
}

impl Default for ViewParameters {
    fn default() -> Self {
        Self {
            viewpoint: Vec3::unit_z(),
            up: Vec3::unit_y(),
            light: Vec3::new(1.0, 1.0, 1.0).normalized(),
            zoom: 1.0,
            style: DrawingStyle::Wireframe,
            auxiliary_edges: false,
            hidden_marker: false,
            segments_per_circle: 24,
            window: WindowGeometry::default(),
            projection: Projection::Orthographic,
            culling_invisible: true,
            background: Colour::WHITE,
        }
    }
}

fn unit(v: Vec3) -> Result<Vec3, ViewError> {
    let n = v.norm();
    if n > 0.0 && n.is_finite() {
        Ok(v / n)
    } else {
        Err(ViewError::ZeroVector)
    }
}

fn parallel(a: Vec3, b: Vec3) -> bool {
    a.cross(b).norm() < 1e-12 * a.norm() * b.norm()
}

impl ViewParameters {
    pub fn set_viewpoint(&mut self, v: Vec3) -> Result<(), ViewError> {
        let v = unit(v)?;
        if parallel(v, self.up) {
            return Err(ViewError::ParallelUpVector);
        }
        self.viewpoint = v;
        Ok(())
    }

    /// Viewpoint `(sinθ cosφ, sinθ sinφ, cosθ)`, angles in radians.
    pub fn set_viewpoint_theta_phi(&mut self, theta: f64, phi: f64) -> Result<(), ViewError> {
        self.set_viewpoint(Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()))
    }

    pub fn set_up(&mut self, v: Vec3) -> Result<(), ViewError> {
        let v = unit(v)?;
        if parallel(v, self.viewpoint) {
            return Err(ViewError::ParallelUpVector);
        }
        self.up = v;
        Ok(())
    }

    pub fn set_light(&mut self, v: Vec3) -> Result<(), ViewError> {
        self.light = unit(v)?;
        Ok(())
    }

    pub fn set_zoom(&mut self, z: f64) -> Result<(), ViewError> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(ViewError::BadZoom(z));
        }
        self.zoom = z;
        Ok(())
    }

    pub fn set_segments_per_circle(&mut self, n: usize) -> Result<(), ViewError> {
        let min = crate::solids::MIN_SEGMENTS_PER_CIRCLE;
        if n < min {
            return Err(ViewError::TooFewSegments { got: n, min });
        }
        self.segments_per_circle = n;
        Ok(())
    }

    /// Right-handed screen basis `(right, up, towards_camera)`.
    pub fn basis(&self) -> (Vec3, Vec3, Vec3) {
        let vp = self.viewpoint;
        let right = self.up.cross(vp).normalized();
        let up = vp.cross(right);
        (right, up, vp)
    }
}

/// Maps world points to viewport coordinates in `[-1, 1]²` (y up) plus a depth
/// that grows towards the camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub right: Vec3,
    pub up: Vec3,
    pub towards: Vec3,
    pub target: Vec3,
    /// World half-size of the viewport's shorter side at the target.
    pub half_size: f64,
    /// Camera distance from the target, for perspective.
    pub distance: f64,
    pub projection: Projection,
    pub aspect: f64,
}

impl Camera {
    /// Frames a sphere of `radius` about `target`.
    pub fn new(view: &ViewParameters, target: Vec3, radius: f64) -> Self {
        let (right, up, towards) = view.basis();
        let radius = if radius > 0.0 { radius } else { 1.0 };
        let half_size = radius / view.zoom;
        let distance = match view.projection {
            Projection::Orthographic => 3.0 * radius,
            Projection::Perspective { fov } => radius / (fov / 2.0).tan().max(1e-6) + radius,
        };
        let aspect = view.window.width as f64 / view.window.height as f64;
        Self { right, up, towards, target, half_size, distance, projection: view.projection, aspect }
    }

    /// `(x, y, depth)`; x and y in `[-1, 1]` across the shorter window side.
    pub fn project(&self, p: Vec3) -> (f64, f64, f64) {
        let d = p - self.target;
        let (x, y, z) = (d.dot(self.right), d.dot(self.up), d.dot(self.towards));
        match self.projection {
            Projection::Orthographic => (x / self.half_size, y / self.half_size, z),
            Projection::Perspective { fov } => {
                let dist = (self.distance - z).max(1e-9);
                let f = 1.0 / (fov / 2.0).tan();
                (f * x / dist, f * y / dist, z)
            }
        }
    }

    /// Viewport `(x, y)` in `[-1, 1]` to pixel coordinates (origin top-left).
    pub fn to_pixels(&self, x: f64, y: f64, width: u32, height: u32) -> (f64, f64) {
        let s = width.min(height) as f64 / 2.0;
        (width as f64 / 2.0 + x * s, height as f64 / 2.0 - y * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_geometry() {
        let w: WindowGeometry = "600x600-0+0".parse().unwrap();
        assert_eq!((w.width, w.height), (600, 600));
        assert!(w.anchored_right() && w.anchored_top());
        assert_eq!(w.to_string(), "600x600-0+0");
        assert_eq!("".parse::<WindowGeometry>().unwrap(), WindowGeometry::default());
        assert_eq!("800x400".parse::<WindowGeometry>().unwrap().height, 400);
        for bad in ["600", "x600", "600x0", "600x600-0", "600x600+a+0"] {
            assert!(bad.parse::<WindowGeometry>().is_err(), "{bad}");
        }
    }

    #[test]
    fn theta_phi() {
        let mut v = ViewParameters::default();
        v.set_viewpoint_theta_phi(120f64.to_radians(), 150f64.to_radians()).unwrap();
        let p = v.viewpoint;
        assert!((p.norm() - 1.0).abs() < 1e-12);
        assert!((p.x + 0.75).abs() < 1e-12 && (p.y - 0.4330127018922193).abs() < 1e-12 && (p.z + 0.5).abs() < 1e-12);
        assert!(v.set_viewpoint(Vec3::unit_y()).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut v = ViewParameters::default();
        v.set_viewpoint(Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        let (r, u, t) = v.basis();
        assert!((r - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        assert!((u - Vec3::unit_y()).norm() < 1e-12);
        assert!((r.cross(u) - t).norm() < 1e-12);
    }
}
