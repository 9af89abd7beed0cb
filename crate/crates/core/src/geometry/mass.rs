use std::collections::HashMap;

use super::{Geometry, GeometryError, LogicalId, PathElement, PhysicalId, Touchable, MAX_DEPTH};

/// Volume and mass accounting for one placement. Volumes in mm³, masses in grams.
#[derive(Clone, Debug, PartialEq)]
pub struct MassNode {
    pub path: Vec<PathElement>,
    pub physical: PhysicalId,
    pub logical: LogicalId,
    pub volume: f64,
    /// Own volume minus the own volumes of the placed daughters.
    pub daughter_subtracted_volume: f64,
    pub density: f64,
    /// `density × daughter_subtracted_volume`.
    pub mass: f64,
    /// `mass` plus the daughter-included masses of all daughters.
    pub daughter_included_mass: f64,
    pub children: Vec<MassNode>,
}

impl MassNode {
    /// Pre-order traversal.
    pub fn iter(&self) -> impl Iterator<Item = &MassNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let n = stack.pop()?;
            stack.extend(n.children.iter().rev());
            Some(n)
        })
    }
}

impl Geometry {
    /// Mass tree below `root`. Nodes at the depth limit keep their full volume.
    pub fn compute_masses(&self, root: &Touchable, depth_limit: Option<usize>) -> Result<MassNode, GeometryError> {
        let mut volumes = HashMap::new();
        self.mass_node(root.clone(), 0, depth_limit, &mut volumes)
    }

    pub fn compute_world_masses(&self, depth_limit: Option<usize>) -> Result<MassNode, GeometryError> {
        self.compute_masses(&self.world_touchable()?, depth_limit)
    }

    fn own_volume(&self, l: LogicalId, cache: &mut HashMap<LogicalId, f64>) -> f64 {
        *cache.entry(l).or_insert_with(|| self.logical(l).solid.analytic_volume())
    }

    fn mass_node(
        &self,
        t: Touchable,
        level: usize,
        depth_limit: Option<usize>,
        cache: &mut HashMap<LogicalId, f64>,
    ) -> Result<MassNode, GeometryError> {
        if t.depth > MAX_DEPTH {
            return Err(GeometryError::DepthOverflow { max: MAX_DEPTH });
        }
        let volume = self.own_volume(t.logical, cache);
        let density = self.material(self.logical(t.logical).material).density;
        let mut children = Vec::new();
        if depth_limit.is_none_or(|d| level < d) {
            for &d in &self.logical(t.logical).daughters {
                let pv = self.physical(d);
                for copy in pv.copy_numbers() {
                    let mut path = t.path.clone();
                    path.push(PathElement::new(pv.name.clone(), copy));
                    let child = self.make_touchable(d, path, t.world_transform.compose(&pv.copy_transform(copy)));
                    children.push(self.mass_node(child, level + 1, depth_limit, cache)?);
                }
            }
        }
        let mut ds = volume - children.iter().map(|c| c.volume).sum::<f64>();
        if ds < 0.0 {
            if ds < -1e-9 * volume {
                return Err(GeometryError::NegativeVolume { volume: t.name().to_string(), ds_volume_mm3: ds });
            }
            ds = 0.0;
        }
        let mass = density * ds;
        let daughter_included_mass = mass + children.iter().map(|c| c.daughter_included_mass).sum::<f64>();
        Ok(MassNode {
            path: t.path,
            physical: t.physical,
            logical: t.logical,
            volume,
            daughter_subtracted_volume: ds,
            density,
            mass,
            daughter_included_mass,
            children,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{fixtures, Material, MaterialState};
    use super::*;
    use crate::math::Axis;
    use crate::units::{CM3, G_PER_CM3, KG};
    use crate::{Solid, Transform};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn b1_masses() {
        let g = fixtures::b1();
        let root = g.compute_world_masses(None).unwrap();
        let nodes: Vec<_> = root.iter().collect();
        assert_eq!(nodes.len(), 4);
        assert!(rel(nodes[0].daughter_subtracted_volume, 8736.0 * CM3) < 1e-9);
        assert!(rel(nodes[0].mass, 10.525) < 5e-5);
        assert!(rel(nodes[1].daughter_subtracted_volume, 10888.1 * CM3) < 5e-6);
        assert!(rel(nodes[1].mass, 10.8881 * KG) < 5e-6);
        assert!(rel(root.daughter_included_mass, 12.8285 * KG) < 5e-6);
        let sum: f64 = root.iter().map(|n| n.mass).sum();
        assert!(rel(sum, root.daughter_included_mass) < 1e-12);
    }

    #[test]
    fn depth_limit_keeps_full_volume() {
        let g = fixtures::b1();
        let root = g.compute_world_masses(Some(0)).unwrap();
        assert!(root.children.is_empty());
        assert_eq!(root.daughter_subtracted_volume, root.volume);
    }

    #[test]
    fn replicas_and_overlaps() {
        let mut g = Geometry::new();
        let m = g.add_material(Material::new("m", G_PER_CM3, MaterialState::Solid).unwrap()).unwrap();
        let w = g.add_logical("W", Solid::new_box("W", 50.0, 10.0, 10.0).unwrap(), m).unwrap();
        let s = g.add_logical("S", Solid::new_box("S", 5.0, 10.0, 10.0).unwrap(), m).unwrap();
        g.set_world("W", w).unwrap();
        g.place_replica(w, "Slice", s, Axis::X, 5, 10.0).unwrap();
        let root = g.compute_world_masses(None).unwrap();
        assert_eq!(root.children.len(), 5);
        assert!(rel(root.daughter_subtracted_volume, 20_000.0) < 1e-12);
        // A second full-size daughter overlaps the replicas.
        let big = g.add_logical("Big", Solid::new_box("Big", 50.0, 10.0, 10.0).unwrap(), m).unwrap();
        g.place(w, "Big", big, Transform::identity(), 0).unwrap();
        assert!(matches!(g.compute_world_masses(None), Err(GeometryError::NegativeVolume { .. })));
    }
}
