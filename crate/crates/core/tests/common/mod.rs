//! Test-side oracles. Nothing here calls the library's containment, volume or
//! intersection code; solids are only read through their public parameters.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use multivis::math::Mat3;
use multivis::solids::{PhiSection, Shape};
use multivis::{Ray, Solid, Transform, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn in_phi(phi: &PhiSection<f64>, x: f64, y: f64) -> bool {
    if phi.delta >= TAU {
        return true;
    }
    if x == 0.0 && y == 0.0 {
        return true;
    }
    (y.atan2(x) - phi.start).rem_euclid(TAU) <= phi.delta
}

/// Closed point-in-solid test straight from the parameter definitions.
pub fn inside(solid: &Solid, p: Vec3) -> bool {
    match solid.shape() {
        Shape::Box { half_x, half_y, half_z } => p.x.abs() <= *half_x && p.y.abs() <= *half_y && p.z.abs() <= *half_z,
        Shape::Tube { r_min, r_max, half_z, phi } => {
            let r2 = p.x * p.x + p.y * p.y;
            p.z.abs() <= *half_z && r2 <= r_max * r_max && r2 >= r_min * r_min && in_phi(phi, p.x, p.y)
        }
        Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
            if p.z.abs() > *half_z {
                return false;
            }
            let t = (p.z + half_z) / (2.0 * half_z);
            let lo = r_min1 + (r_min2 - r_min1) * t;
            let hi = r_max1 + (r_max2 - r_max1) * t;
            let r = p.x.hypot(p.y);
            r >= lo && r <= hi && in_phi(phi, p.x, p.y)
        }
        Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
            if p.z.abs() > *half_z {
                return false;
            }
            let t = (p.z + half_z) / (2.0 * half_z);
            p.x.abs() <= half_x1 + (half_x2 - half_x1) * t && p.y.abs() <= half_y1 + (half_y2 - half_y1) * t
        }
        Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
            let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
            if r2 > r_max * r_max || r2 < r_min * r_min || !in_phi(phi, p.x, p.y) {
                return false;
            }
            if *theta_start <= 0.0 && theta_start + delta_theta >= PI {
                return true;
            }
            let r = r2.sqrt();
            if r == 0.0 {
                return *theta_start <= 0.0 || theta_start + delta_theta >= PI;
            }
            let c = p.z / r;
            c <= theta_start.cos() && c >= (theta_start + delta_theta).cos()
        }
        Shape::Subtraction { left, right, transform } => {
            inside(left, p) && !inside(right, transform.inverse().apply_point(p))
        }
    }
}

/// Local-frame box every point of the solid lies in.
pub fn enclosing_box(solid: &Solid) -> (Vec3, Vec3) {
    let h = match solid.shape() {
        Shape::Box { half_x, half_y, half_z } => Vec3::new(*half_x, *half_y, *half_z),
        Shape::Tube { r_max, half_z, .. } => Vec3::new(*r_max, *r_max, *half_z),
        Shape::Cone { r_max1, r_max2, half_z, .. } => {
            let r = r_max1.max(*r_max2);
            Vec3::new(r, r, *half_z)
        }
        Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
            Vec3::new(half_x1.max(*half_x2), half_y1.max(*half_y2), *half_z)
        }
        Shape::Sphere { r_max, .. } => Vec3::new(*r_max, *r_max, *r_max),
        Shape::Subtraction { left, .. } => return enclosing_box(left),
    };
    (-h, h)
}

/// Volume of the simple closed forms, written independently of the library.
pub fn closed_form_volume(solid: &Solid) -> Option<f64> {
    Some(match solid.shape() {
        Shape::Box { half_x, half_y, half_z } => 8.0 * half_x * half_y * half_z,
        Shape::Tube { r_min, r_max, half_z, phi } => {
            phi.delta.min(TAU) * 2.0 * half_z * (r_max * r_max - r_min * r_min) / 2.0
        }
        Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
            // Integrate the annulus area over z with Simpson's rule; it is exact for quadratics.
            let area = |t: f64| {
                let (a, b) = (r_min1 + (r_min2 - r_min1) * t, r_max1 + (r_max2 - r_max1) * t);
                phi.delta.min(TAU) / 2.0 * (b * b - a * a)
            };
            2.0 * half_z * (area(0.0) + 4.0 * area(0.5) + area(1.0)) / 6.0
        }
        Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
            let area = |t: f64| 4.0 * (half_x1 + (half_x2 - half_x1) * t) * (half_y1 + (half_y2 - half_y1) * t);
            2.0 * half_z * (area(0.0) + 4.0 * area(0.5) + area(1.0)) / 6.0
        }
        Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
            let solid_angle = phi.delta.min(TAU) * (theta_start.cos() - (theta_start + delta_theta).cos());
            solid_angle * (r_max.powi(3) - r_min.powi(3)) / 3.0
        }
        Shape::Subtraction { .. } => return None,
    })
}

/// Hit-or-miss estimate `(volume, standard error)`.
pub fn mc_volume(solid: &Solid, samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (lo, hi) = enclosing_box(solid);
    let size = hi - lo;
    let box_volume = size.x * size.y * size.z;
    let hits = (0..samples)
        .filter(|_| {
            let p = Vec3::new(
                lo.x + size.x * rng.gen::<f64>(),
                lo.y + size.y * rng.gen::<f64>(),
                lo.z + size.z * rng.gen::<f64>(),
            );
            inside(solid, p)
        })
        .count();
    let f = hits as f64 / samples as f64;
    (f * box_volume, box_volume * (f * (1.0 - f) / samples as f64).sqrt())
}

fn phi_section(rng: &mut ChaCha8Rng) -> (f64, f64) {
    if rng.gen_bool(0.4) {
        (0.0, TAU)
    } else {
        (rng.gen_range(-PI..PI), rng.gen_range(0.3..TAU))
    }
}

/// One primitive of each kind in turn, with random dimensions in mm.
pub fn random_primitive(kind: usize, rng: &mut ChaCha8Rng) -> Solid {
    let mut len = || rng.gen_range(2.0..80.0);
    let (a, b, c, d, e) = (len(), len(), len(), len(), len());
    match kind % 5 {
        0 => Solid::new_box("box", a, b, c).unwrap(),
        1 => {
            let (s, dp) = phi_section(rng);
            let r_min = if rng.gen_bool(0.5) { 0.0 } else { a * rng.gen_range(0.1..0.9) };
            Solid::new_tube("tube", r_min, a, b, s, dp).unwrap()
        }
        2 => {
            let (s, dp) = phi_section(rng);
            let hollow = rng.gen_bool(0.5);
            let r_min1 = if hollow { a * rng.gen_range(0.1..0.9) } else { 0.0 };
            let (r_min2, r_max2) = if rng.gen_bool(0.2) {
                (0.0, 0.0)
            } else if hollow {
                (b * rng.gen_range(0.1..0.9), b)
            } else {
                (0.0, b)
            };
            Solid::new_cone("cone", r_min1, a, r_min2, r_max2, c, s, dp).unwrap()
        }
        3 => Solid::new_trd("trd", a, b, c, d, e).unwrap(),
        _ => {
            let (s, dp) = phi_section(rng);
            let r_min = if rng.gen_bool(0.5) { 0.0 } else { a * rng.gen_range(0.1..0.9) };
            let (ts, dt) = if rng.gen_bool(0.4) {
                (0.0, PI)
            } else {
                let ts = rng.gen_range(0.0..2.5);
                (ts, rng.gen_range(0.3..(PI - ts).max(0.31)).min(PI - ts))
            };
            Solid::new_sphere("sphere", r_min, a, s, dp, ts, dt).unwrap()
        }
    }
}

/// A box or tube with a randomly placed, rotated hole.
pub fn random_subtraction(rng: &mut ChaCha8Rng) -> Solid {
    let left = random_primitive(if rng.gen_bool(0.5) { 0 } else { 1 }, rng);
    let (lo, hi) = enclosing_box(&left);
    let right = random_primitive(rng.gen_range(0..5), rng);
    let centre = Vec3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z));
    let rot = Mat3::rotation_z(rng.gen_range(0.0..TAU)).mul_mat(&Mat3::rotation_x(rng.gen_range(0.0..PI)));
    Solid::new_subtraction("sub", left, right, Transform::new(rot, centre)).unwrap()
}

fn slab(lo: Vec3, hi: Vec3, ray: &Ray) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for (o, d, a, b) in [
        (ray.origin.x, ray.direction.x, lo.x, hi.x),
        (ray.origin.y, ray.direction.y, lo.y, hi.y),
        (ray.origin.z, ray.direction.z, lo.z, hi.z),
    ] {
        if d == 0.0 {
            if o < a || o > b {
                return None;
            }
            continue;
        }
        let (u, v) = ((a - o) / d, (b - o) / d);
        t0 = t0.max(u.min(v));
        t1 = t1.min(u.max(v));
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Boundary between an outside parameter `a` and an inside parameter `b`.
fn bisect(solid: &Solid, ray: &Ray, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if inside(solid, ray.at(m)) {
            b = m;
        } else {
            a = m;
        }
    }
    b
}

/// First inside sample of a march over `[t0, t1]` and the length of the
/// inside run that follows it.
fn march(solid: &Solid, ray: &Ray, t0: f64, t1: f64, steps: usize) -> Option<(f64, f64)> {
    let h = (t1 - t0) / steps as f64;
    let mut prev = t0;
    if inside(solid, ray.at(t0)) {
        return Some((t0, run_length(solid, ray, t0, h)));
    }
    for k in 1..=steps {
        let t = t0 + h * k as f64;
        if inside(solid, ray.at(t)) {
            let enter = bisect(solid, ray, prev, t);
            return Some((enter, run_length(solid, ray, enter, h)));
        }
        prev = t;
    }
    None
}

fn run_length(solid: &Solid, ray: &Ray, enter: f64, h: f64) -> f64 {
    let mut t = enter;
    while inside(solid, ray.at(t + h)) {
        t += h;
    }
    let mut b = t + h;
    let mut a = t;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if inside(solid, ray.at(m)) {
            a = m;
        } else {
            b = m;
        }
    }
    a - enter
}

/// Dense-march first entry along a ray that starts outside the solid.
/// `hint` is where another method claims the entry is; the neighbourhood is
/// searched more finely so thin slivers are not stepped over.
pub struct MarchResult {
    pub entry: Option<f64>,
    /// Length of the first inside run.
    pub chord: f64,
}

pub fn march_entry(solid: &Solid, ray: &Ray, steps: usize, hint: Option<f64>) -> MarchResult {
    let (lo, hi) = enclosing_box(solid);
    let pad = Vec3::new(1e-6, 1e-6, 1e-6);
    let Some((t0, t1)) = slab(lo - pad, hi + pad, ray) else { return MarchResult { entry: None, chord: 0.0 } };
    let coarse = march(solid, ray, t0, t1, steps);
    let h = (t1 - t0) / steps as f64;
    if let Some(d) = hint {
        let needs_fine = match coarse {
            None => true,
            Some((e, _)) => e > d + 1e-5,
        };
        if needs_fine {
            let (a, b) = ((d - h).max(t0), (d + h).min(t1));
            if let Some((e, c)) = march(solid, ray, a, b, 20_000) {
                if coarse.is_none_or(|(ce, _)| e < ce) {
                    return MarchResult { entry: Some(e), chord: c };
                }
            }
        }
    }
    match coarse {
        Some((e, c)) => MarchResult { entry: Some(e), chord: c },
        None => MarchResult { entry: None, chord: 0.0 },
    }
}

/// Ray from a sphere around the solid towards a random point of its box.
pub fn random_ray(solid: &Solid, rng: &mut ChaCha8Rng) -> Ray {
    let (lo, hi) = enclosing_box(solid);
    let size = hi - lo;
    let radius = 0.5 * size.norm();
    let centre = (lo + hi) * 0.5;
    let dir = loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v * (1.0 / n);
        }
    };
    let origin = centre + dir * (2.5 * radius);
    let target = Vec3::new(
        lo.x + 1.2 * size.x * (rng.gen::<f64>() - 0.0833),
        lo.y + 1.2 * size.y * (rng.gen::<f64>() - 0.0833),
        lo.z + 1.2 * size.z * (rng.gen::<f64>() - 0.0833),
    );
    Ray::new(origin, target - origin)
}
