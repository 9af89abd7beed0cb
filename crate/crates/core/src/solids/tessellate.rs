//! Polygonal approximation of solids.
//!
//! Curved surfaces are cut into `segments_per_circle` divisions per full turn.
//! Edges created only by that discretisation are marked auxiliary so viewers
//! can hide them; edges on real feature lines (rims, end faces) are real.

use std::collections::HashMap;

use crate::math::{Transform3, Vec3};
use crate::real::Real;

use super::{Containment, PhiSection, Shape, Solid, SolidError};

pub const MIN_SEGMENTS_PER_CIRCLE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Real,
    Auxiliary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeshEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh<T> {
    pub vertices: Vec<Vec3<T>>,
    /// Polygons as vertex indices, counter-clockwise seen from outside.
    pub faces: Vec<Vec<usize>>,
    pub edges: Vec<MeshEdge>,
}

impl<T: Real> Mesh<T> {
    pub fn face_centroid(&self, face: usize) -> Vec3<T> {
        let f = &self.faces[face];
        let sum = f.iter().fold(Vec3::zero(), |acc, &i| acc + self.vertices[i]);
        sum / T::lit(f.len() as f64)
    }

    /// Newell normal (unnormalised; length is twice the polygon area).
    pub fn face_area_vector(&self, face: usize) -> Vec3<T> {
        newell(self.faces[face].iter().map(|&i| self.vertices[i]))
    }

    pub fn face_normal(&self, face: usize) -> Vec3<T> {
        self.face_area_vector(face).normalized()
    }

    /// Enclosed volume by the divergence theorem; positive for outward winding.
    pub fn signed_volume(&self) -> T {
        let mut six_v = T::zero();
        for f in &self.faces {
            let p0 = self.vertices[f[0]];
            for w in f[1..].windows(2) {
                six_v = six_v + p0.dot(self.vertices[w[0]].cross(self.vertices[w[1]]));
            }
        }
        six_v / T::lit(6.0)
    }

    pub fn transformed(&self, t: &Transform3<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| t.apply_point(v)).collect(),
            faces: self.faces.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn real_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Real).count()
    }

    /// Largest distance of any face vertex from its face's best-fit plane.
    pub fn max_planarity_error(&self) -> T {
        let mut worst = T::zero();
        for (fi, f) in self.faces.iter().enumerate() {
            let n = self.face_normal(fi);
            let c = self.face_centroid(fi);
            for &i in f {
                worst = worst.max((self.vertices[i] - c).dot(n).abs());
            }
        }
        worst
    }

    /// Indices in range, faces with ≥ 3 distinct vertices, planarity within tolerance.
    pub fn is_valid(&self) -> bool {
        let n = self.vertices.len();
        self.faces.iter().all(|f| f.len() >= 3 && f.iter().all(|&i| i < n))
            && self.edges.iter().all(|e| e.a < n && e.b < n && e.a != e.b)
            && self.max_planarity_error() <= T::PLANARITY_TOLERANCE
    }

    /// Every directed edge appears once and its reverse once.
    pub fn is_closed_manifold(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..f.len() {
                *directed.entry((f[k], f[(k + 1) % f.len()])).or_default() += 1;
            }
        }
        directed.iter().all(|(&(a, b), &count)| count == 1 && directed.get(&(b, a)) == Some(&1))
    }
}

fn newell<T: Real>(points: impl Iterator<Item = Vec3<T>> + Clone) -> Vec3<T> {
    let pts: Vec<Vec3<T>> = points.collect();
    let mut n = Vec3::zero();
    for k in 0..pts.len() {
        let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
        n.x = n.x + (a.y - b.y) * (a.z + b.z);
        n.y = n.y + (a.z - b.z) * (a.x + b.x);
        n.z = n.z + (a.x - b.x) * (a.y + b.y);
    }
    n
}

/// Accumulates a mesh, merging bit-identical vertices and resolving edge kinds
/// (an edge is real if any face contributes it as real).
struct MeshBuilder<T> {
    vertices: Vec<Vec3<T>>,
    lookup: HashMap<[u64; 3], usize>,
    faces: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
    edges: Vec<MeshEdge>,
}

impl<T: Real> MeshBuilder<T> {
    fn new() -> Self {
        Self {
            vertices: Vec::new(),
            lookup: HashMap::new(),
            faces: Vec::new(),
            edge_index: HashMap::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, p: Vec3<T>) -> usize {
        let p = p.canonical();
        let key = p.to_f64().map(f64::to_bits);
        *self.lookup.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            self.vertices.len() - 1
        })
    }

    fn edge(&mut self, a: usize, b: usize, kind: EdgeKind) {
        let key = (a.min(b), a.max(b));
        match self.edge_index.get(&key) {
            Some(&i) => {
                if kind == EdgeKind::Real {
                    self.edges[i].kind = EdgeKind::Real;
                }
            }
            None => {
                self.edge_index.insert(key, self.edges.len());
                self.edges.push(MeshEdge { a: key.0, b: key.1, kind });
            }
        }
    }

    /// Adds a polygon given as `(vertex, kind of edge to the next vertex)`,
    /// dropping repeated vertices and orienting it along `outward`.
    fn face(&mut self, ring: &[(usize, EdgeKind)], outward: Vec3<T>) {
        let mut poly: Vec<(usize, EdgeKind)> = Vec::with_capacity(ring.len());
        for &(v, k) in ring {
            match poly.last_mut() {
                Some(last) if last.0 == v => last.1 = k,
                _ => poly.push((v, k)),
            }
        }
        while poly.len() > 1 && poly[0].0 == poly[poly.len() - 1].0 {
            poly.pop();
        }
        if poly.len() < 3 {
            return;
        }
        for k in 0..poly.len() {
            let (a, kind) = poly[k];
            let b = poly[(k + 1) % poly.len()].0;
            self.edge(a, b, kind);
        }
        let mut idx: Vec<usize> = poly.iter().map(|p| p.0).collect();
        let n = newell(idx.iter().map(|&i| self.vertices[i]));
        if n.dot(outward) < T::zero() {
            idx.reverse();
        }
        self.faces.push(idx);
    }

    fn finish(self) -> Mesh<T> {
        Mesh { vertices: self.vertices, faces: self.faces, edges: self.edges }
    }
}

/// Divisions for an arc of `delta` radians at `segments` per full circle.
fn divisions<T: Real>(segments: usize, delta: T) -> usize {
    let n = T::lit(segments as f64) * delta / T::TAU() - T::lit(1e-9);
    n.ceil().to_usize().unwrap_or(1).max(1)
}

/// Precomputed azimuths of a phi section.
struct Azimuths<T> {
    cos_sin: Vec<(T, T)>,
    full: bool,
}

impl<T: Real> Azimuths<T> {
    fn new(phi: &PhiSection<T>, segments: usize) -> Self {
        let full = phi.is_full();
        let n = divisions(segments, phi.delta);
        let count = if full { n } else { n + 1 };
        let cos_sin = (0..count)
            .map(|i| {
                let a = phi.start + phi.delta * T::lit(i as f64) / T::lit(n as f64);
                (a.cos(), a.sin())
            })
            .collect();
        Self { cos_sin, full }
    }

    /// Number of segments between consecutive azimuths.
    fn segments(&self) -> usize {
        if self.full {
            self.cos_sin.len()
        } else {
            self.cos_sin.len() - 1
        }
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.cos_sin.len()
    }
}

/// A ring of vertices at fixed radius and height (collapsed to one vertex at r = 0).
fn ring<T: Real>(b: &mut MeshBuilder<T>, az: &Azimuths<T>, r: T, z: T) -> Vec<usize> {
    az.cos_sin
        .iter()
        .map(|&(c, s)| {
            if r == T::zero() {
                b.vertex(Vec3::new(T::zero(), T::zero(), z))
            } else {
                b.vertex(Vec3::new(r * c, r * s, z))
            }
        })
        .collect()
}

/// Quads between two rings. Lines joining the rings are auxiliary.
fn band<T: Real>(
    b: &mut MeshBuilder<T>,
    az: &Azimuths<T>,
    ring_a: &[usize],
    ring_b: &[usize],
    rim_kind: EdgeKind,
    outward: impl Fn(Vec3<T>) -> Vec3<T>,
) {
    use EdgeKind::Auxiliary;
    for i in 0..az.segments() {
        let j = az.next(i);
        let quad = [(ring_a[i], rim_kind), (ring_a[j], Auxiliary), (ring_b[j], rim_kind), (ring_b[i], Auxiliary)];
        let centroid = quad.iter().fold(Vec3::zero(), |acc, q| acc + b.vertices[q.0]) / T::lit(4.0);
        b.face(&quad, outward(centroid));
    }
}

/// Flat cap at height `z` between an inner and an outer ring.
fn cap<T: Real>(b: &mut MeshBuilder<T>, az: &Azimuths<T>, inner: &[usize], outer: &[usize], z: T, normal: Vec3<T>) {
    use EdgeKind::Real;
    let collapsed = inner.iter().all(|&v| v == inner[0]);
    if collapsed {
        let mut poly: Vec<(usize, EdgeKind)> = Vec::new();
        if !az.full {
            poly.push((inner[0], Real));
        }
        poly.extend(outer.iter().map(|&v| (v, Real)));
        b.face(&poly, normal);
    } else {
        let _ = z;
        band(b, az, inner, outer, Real, |_| normal);
    }
}

fn radial<T: Real>(p: Vec3<T>) -> Vec3<T> {
    Vec3::new(p.x, p.y, T::zero())
}

/// Outward normals of the start and end planes of a phi section.
fn phi_end_normals<T: Real>(phi: &PhiSection<T>) -> (Vec3<T>, Vec3<T>) {
    let (s, e) = (phi.start, phi.end());
    (Vec3::new(s.sin(), -s.cos(), T::zero()), Vec3::new(-e.sin(), e.cos(), T::zero()))
}

/// Tubes and cones share one construction: four rings and up to six surfaces.
#[allow(clippy::too_many_arguments)]
fn revolved<T: Real>(
    segments: usize,
    r_min1: T,
    r_max1: T,
    r_min2: T,
    r_max2: T,
    half_z: T,
    phi: &PhiSection<T>,
) -> Mesh<T> {
    use EdgeKind::Real;
    let mut b = MeshBuilder::new();
    let az = Azimuths::new(phi, segments);
    let (z1, z2) = (-half_z, half_z);
    let outer1 = ring(&mut b, &az, r_max1, z1);
    let outer2 = ring(&mut b, &az, r_max2, z2);
    let inner1 = ring(&mut b, &az, r_min1, z1);
    let inner2 = ring(&mut b, &az, r_min2, z2);
    let slope_out = (r_max2 - r_max1) / (T::two() * half_z);
    let slope_in = (r_min2 - r_min1) / (T::two() * half_z);

    band(&mut b, &az, &outer1, &outer2, Real, |c| radial(c).normalized() + Vec3::new(T::zero(), T::zero(), -slope_out));
    if r_min1 > T::zero() || r_min2 > T::zero() {
        band(&mut b, &az, &inner1, &inner2, Real, |c| {
            -(radial(c).normalized() + Vec3::new(T::zero(), T::zero(), -slope_in))
        });
    }
    if r_max1 > r_min1 {
        cap(&mut b, &az, &inner1, &outer1, z1, -Vec3::unit_z());
    }
    if r_max2 > r_min2 {
        cap(&mut b, &az, &inner2, &outer2, z2, Vec3::unit_z());
    }
    if !az.full {
        let (n_start, n_end) = phi_end_normals(phi);
        let last = az.cos_sin.len() - 1;
        for (i, n) in [(0, n_start), (last, n_end)] {
            let poly = [(inner1[i], Real), (outer1[i], Real), (outer2[i], Real), (inner2[i], Real)];
            b.face(&poly, n);
        }
    }
    b.finish()
}

#[allow(clippy::too_many_arguments)]
fn sphere_mesh<T: Real>(
    segments: usize,
    r_min: T,
    r_max: T,
    phi: &PhiSection<T>,
    theta_start: T,
    delta_theta: T,
) -> Mesh<T> {
    use EdgeKind::{Auxiliary, Real};
    let mut b = MeshBuilder::new();
    let az = Azimuths::new(phi, segments);
    let n_theta = divisions(segments, delta_theta);
    let theta_end = theta_start + delta_theta;
    let polar: Vec<(T, T)> = (0..=n_theta)
        .map(|j| {
            let th = theta_start + delta_theta * T::lit(j as f64) / T::lit(n_theta as f64);
            if j == 0 && theta_start == T::zero() {
                (T::one(), T::zero())
            } else if j == n_theta && theta_end >= T::PI() {
                (-T::one(), T::zero())
            } else {
                (th.cos(), th.sin())
            }
        })
        .collect();
    // rings[j] = azimuthal ring at polar index j and radius r
    let shell = |b: &mut MeshBuilder<T>, r: T| -> Vec<Vec<usize>> {
        polar
            .iter()
            .map(|&(ct, st)| {
                az.cos_sin
                    .iter()
                    .map(|&(cp, sp)| {
                        if r == T::zero() || st == T::zero() {
                            b.vertex(Vec3::new(T::zero(), T::zero(), r * ct))
                        } else {
                            b.vertex(Vec3::new(r * st * cp, r * st * sp, r * ct))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let outer = shell(&mut b, r_max);
    let inner = shell(&mut b, r_min);
    for j in 0..n_theta {
        band(&mut b, &az, &outer[j], &outer[j + 1], Auxiliary, |c| c);
        if r_min > T::zero() {
            band(&mut b, &az, &inner[j], &inner[j + 1], Auxiliary, |c| -c);
        }
    }
    // Conical faces closing a restricted polar range; outward is along ∓e_θ.
    if theta_start > T::zero() {
        band(&mut b, &az, &inner[0], &outer[0], Real, |c| {
            let (ct, st) = (polar[0].0, polar[0].1);
            let r = radial(c).normalized();
            -(r * ct - Vec3::unit_z() * st)
        });
    }
    if theta_end < T::PI() {
        band(&mut b, &az, &inner[n_theta], &outer[n_theta], Real, |c| {
            let (ct, st) = (polar[n_theta].0, polar[n_theta].1);
            let r = radial(c).normalized();
            r * ct - Vec3::unit_z() * st
        });
    }
    if !az.full {
        let (n_start, n_end) = phi_end_normals(phi);
        let last = az.cos_sin.len() - 1;
        for (i, n) in [(0, n_start), (last, n_end)] {
            let mut poly: Vec<(usize, EdgeKind)> = outer.iter().map(|row| (row[i], Real)).collect();
            poly.extend(inner.iter().rev().map(|row| (row[i], Real)));
            b.face(&poly, n);
        }
    }
    b.finish()
}

fn box_like<T: Real>(bottom: (T, T), top: (T, T), half_z: T) -> Mesh<T> {
    use EdgeKind::Real;
    let mut b = MeshBuilder::new();
    let corners = |b: &mut MeshBuilder<T>, (hx, hy): (T, T), z: T| {
        [
            b.vertex(Vec3::new(-hx, -hy, z)),
            b.vertex(Vec3::new(hx, -hy, z)),
            b.vertex(Vec3::new(hx, hy, z)),
            b.vertex(Vec3::new(-hx, hy, z)),
        ]
    };
    let lo = corners(&mut b, bottom, -half_z);
    let hi = corners(&mut b, top, half_z);
    let ring = |v: [usize; 4]| v.map(|i| (i, Real));
    b.face(&ring(lo), -Vec3::unit_z());
    b.face(&ring(hi), Vec3::unit_z());
    for k in 0..4 {
        let m = (k + 1) % 4;
        let quad = [(lo[k], Real), (lo[m], Real), (hi[m], Real), (hi[k], Real)];
        let centroid = (b.vertices[lo[k]] + b.vertices[lo[m]] + b.vertices[hi[m]] + b.vertices[hi[k]]) / T::lit(4.0);
        b.face(&quad, radial(centroid));
    }
    b.finish()
}

/// Splits a planar polygon into smaller planar cells: quads into an `n × n`
/// grid, anything else into fan triangles each cut into `n²` triangles.
fn subdivide<T: Real>(poly: &[Vec3<T>], n: usize) -> Vec<Vec<Vec3<T>>> {
    if n <= 1 {
        return vec![poly.to_vec()];
    }
    let step = |k: usize| T::lit(k as f64) / T::lit(n as f64);
    let mut cells = Vec::new();
    if poly.len() == 4 {
        let at = |u: T, v: T| poly[0].lerp(poly[1], u).lerp(poly[3].lerp(poly[2], u), v);
        for j in 0..n {
            for i in 0..n {
                let (u0, u1, v0, v1) = (step(i), step(i + 1), step(j), step(j + 1));
                cells.push(vec![at(u0, v0), at(u1, v0), at(u1, v1), at(u0, v1)]);
            }
        }
        return cells;
    }
    for k in 1..poly.len() - 1 {
        let (a, b, c) = (poly[0], poly[k], poly[k + 1]);
        let at = |i: usize, j: usize| a + (b - a) * step(i) + (c - a) * step(j);
        for j in 0..n {
            for i in 0..n - j {
                cells.push(vec![at(i, j), at(i + 1, j), at(i, j + 1)]);
                if i + j + 1 < n {
                    cells.push(vec![at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
                }
            }
        }
    }
    cells
}

fn on_segment<T: Real>(p: Vec3<T>, a: Vec3<T>, b: Vec3<T>, eps: T) -> bool {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == T::zero() {
        return (p - a).norm() <= eps;
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    (a + ab * t - p).norm() <= eps
}

/// Faces of `source` (mapped by `transform`) whose centroid satisfies `keep`.
/// Faces overlapping `refine_near` are subdivided first so the centroid test
/// resolves the other operand's outline.
fn clipped_faces<T: Real>(
    b: &mut MeshBuilder<T>,
    source: &Mesh<T>,
    transform: &Transform3<T>,
    refine_near: &crate::math::Aabb<T>,
    keep: impl Fn(Vec3<T>) -> bool,
    flip: bool,
) {
    let kinds: HashMap<(usize, usize), EdgeKind> = source.edges.iter().map(|e| ((e.a, e.b), e.kind)).collect();
    let cell_target = refine_near.size().norm() / T::lit(8.0);
    for (fi, f) in source.faces.iter().enumerate() {
        let pts: Vec<Vec3<T>> = f.iter().map(|&i| transform.apply_point(source.vertices[i])).collect();
        let mut face_box = crate::math::Aabb::empty();
        pts.iter().for_each(|&p| face_box.include(p));
        let near = !face_box.union(refine_near).is_empty()
            && face_box.min.x <= refine_near.max.x
            && face_box.max.x >= refine_near.min.x
            && face_box.min.y <= refine_near.max.y
            && face_box.max.y >= refine_near.min.y
            && face_box.min.z <= refine_near.max.z
            && face_box.max.z >= refine_near.min.z;
        let n = if near && cell_target > T::zero() {
            (face_box.size().norm() / cell_target).ceil().to_usize().unwrap_or(1).clamp(1, 16)
        } else {
            1
        };
        let mut normal = transform.apply_vector(source.face_area_vector(fi));
        if flip {
            normal = -normal;
        }
        let eps = face_box.size().norm() * T::lit(1e-9);
        for cell in subdivide(&pts, n) {
            let centroid = cell.iter().fold(Vec3::zero(), |acc, &p| acc + p) / T::lit(cell.len() as f64);
            if !keep(centroid) {
                continue;
            }
            let ring: Vec<(usize, EdgeKind)> = (0..cell.len())
                .map(|k| {
                    let (p, q) = (cell[k], cell[(k + 1) % cell.len()]);
                    // Cell edges on the original boundary inherit its kind.
                    let kind = (0..f.len())
                        .find(|&m| {
                            let (a, c) = (pts[m], pts[(m + 1) % f.len()]);
                            on_segment(p, a, c, eps) && on_segment(q, a, c, eps)
                        })
                        .map(|m| {
                            let (a, c) = (f[m], f[(m + 1) % f.len()]);
                            kinds.get(&(a.min(c), a.max(c))).copied().unwrap_or(EdgeKind::Real)
                        })
                        .unwrap_or(EdgeKind::Auxiliary);
                    (b.vertex(p), kind)
                })
                .collect();
            b.face(&ring, normal);
        }
    }
}

impl<T: Real> Solid<T> {
    /// Polygon mesh of the solid in its local frame.
    ///
    /// Subtractions keep the left operand's faces whose centroid is outside the
    /// right operand, plus the right operand's faces whose centroid is inside
    /// the left operand (reversed). This is a visual approximation, not exact CSG.
    pub fn tessellate(&self, segments_per_circle: usize) -> Result<Mesh<T>, SolidError> {
        if segments_per_circle < MIN_SEGMENTS_PER_CIRCLE {
            return Err(SolidError::TooFewSegments { requested: segments_per_circle, min: MIN_SEGMENTS_PER_CIRCLE });
        }
        let s = segments_per_circle;
        Ok(match self.shape() {
            Shape::Box { half_x, half_y, half_z } => box_like((*half_x, *half_y), (*half_x, *half_y), *half_z),
            Shape::Trd { half_x1, half_x2, half_y1, half_y2, half_z } => {
                box_like((*half_x1, *half_y1), (*half_x2, *half_y2), *half_z)
            }
            Shape::Tube { r_min, r_max, half_z, phi } => revolved(s, *r_min, *r_max, *r_min, *r_max, *half_z, phi),
            Shape::Cone { r_min1, r_max1, r_min2, r_max2, half_z, phi } => {
                revolved(s, *r_min1, *r_max1, *r_min2, *r_max2, *half_z, phi)
            }
            Shape::Sphere { r_min, r_max, phi, theta_start, delta_theta } => {
                sphere_mesh(s, *r_min, *r_max, phi, *theta_start, *delta_theta)
            }
            Shape::Subtraction { left, right, transform } => {
                let left_mesh = left.tessellate(s)?;
                let right_mesh = right.tessellate(s)?;
                let to_right = transform.inverse();
                let right_box = right.bounding_box().transformed(transform);
                let overlap = crate::math::Aabb::new(
                    right_box.min.max(left.bounding_box().min),
                    right_box.max.min(left.bounding_box().max),
                );
                let mut b = MeshBuilder::new();
                clipped_faces(
                    &mut b,
                    &left_mesh,
                    &Transform3::identity(),
                    &overlap,
                    |c| right.contains(to_right.apply_point(c)) != Containment::Inside,
                    false,
                );
                clipped_faces(
                    &mut b,
                    &right_mesh,
                    transform,
                    &overlap,
                    |c| left.contains(c) == Containment::Inside,
                    true,
                );
                b.finish()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn check(mesh: &Mesh<f64>) {
        assert!(mesh.is_valid(), "invalid mesh");
        assert!(mesh.is_closed_manifold(), "mesh not closed");
    }

    #[test]
    fn box_topology() {
        let m = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap().tessellate(24).unwrap();
        check(&m);
        assert_eq!((m.vertices.len(), m.faces.len(), m.edges.len()), (8, 6, 12));
        assert_eq!(m.real_edge_count(), 12);
        assert!((m.signed_volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn tube_side_facets_and_auxiliary_laterals() {
        let m = Solid::new_tube("t", 0.0, 1.0, 1.0, 0.0, TAU).unwrap().tessellate(24).unwrap();
        check(&m);
        let side = m.faces.iter().filter(|f| f.len() == 4).count();
        assert_eq!(side, 24);
        assert_eq!(m.faces.len(), 26);
        let vertical_aux = m
            .edges
            .iter()
            .filter(|e| {
                let (a, b) = (m.vertices[e.a], m.vertices[e.b]);
                (a.z - b.z).abs() > 1.0 && e.kind == EdgeKind::Auxiliary
            })
            .count();
        assert_eq!(vertical_aux, 24);
        assert_eq!(m.real_edge_count(), 48);
    }

    #[test]
    fn too_few_segments_is_rejected() {
        let t = Solid::new_tube("t", 0.0, 1.0, 1.0, 0.0, TAU).unwrap();
        assert!(matches!(t.tessellate(11), Err(SolidError::TooFewSegments { requested: 11, min: 12 })));
    }

    #[test]
    fn partial_and_hollow_shapes_are_closed() {
        let shapes = [
            Solid::new_tube("a", 0.5, 1.0, 1.0, 0.3, 1.2).unwrap(),
            Solid::new_tube("b", 0.0, 1.0, 1.0, 0.3, 4.0).unwrap(),
            Solid::new_cone("c", 0.2, 1.0, 0.0, 0.5, 1.0, 0.0, TAU).unwrap(),
            Solid::new_cone("d", 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0).unwrap(),
            Solid::new_sphere("e", 0.0, 1.0, 0.0, TAU, 0.0, PI).unwrap(),
            Solid::new_sphere("f", 0.4, 1.0, 0.5, 2.0, 0.3, 1.9).unwrap(),
            Solid::new_sphere("g", 0.0, 1.0, 0.0, 4.0, 0.2, 1.0).unwrap(),
            Solid::new_trd("h", 1.0, 2.0, 0.5, 1.5, 1.0).unwrap(),
        ];
        for s in &shapes {
            let m = s.tessellate(48).unwrap();
            check(&m);
            let v = m.signed_volume();
            assert!(v > 0.0 && (v - s.analytic_volume()).abs() / s.analytic_volume() < 0.02, "{}: {v}", s.name());
        }
    }

    #[test]
    fn sphere_mesh_volume_within_half_percent() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        let m = s.tessellate(100).unwrap();
        check(&m);
        let exact = 4.0 / 3.0 * PI;
        assert!((m.signed_volume() - exact).abs() / exact < 0.005);
    }

    #[test]
    fn subtraction_mesh_drops_carved_faces() {
        let a = Solid::new_box("a", 3.0, 3.0, 3.0).unwrap();
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let s = Solid::new_subtraction("s", a, b, Transform3::translation(Vec3::new(3.0, 3.0, 3.0))).unwrap();
        let m = s.tessellate(24).unwrap();
        assert!(m.is_valid());
        let to_b: Vec3<f64> = Vec3::new(3.0, 3.0, 3.0);
        for fi in 0..m.faces.len() {
            let c = m.face_centroid(fi);
            // No surviving cell of A lies strictly inside B.
            let d = (c - to_b).abs();
            assert!(!(d.x < 1.0 - 1e-9 && d.y < 1.0 - 1e-9 && d.z < 1.0 - 1e-9));
        }
        // The carved pocket walls come from B, facing into the pocket.
        let pocket = (0..m.faces.len())
            .filter(|&fi| {
                let c = m.face_centroid(fi);
                (c.x - 2.0).abs() < 1e-9 && c.y > 2.0 && c.y < 3.0 && c.z > 2.0 && c.z < 3.0
            })
            .collect::<Vec<_>>();
        assert!(!pocket.is_empty());
        for fi in pocket {
            assert!(m.face_normal(fi).x > 0.99);
        }
    }
}
