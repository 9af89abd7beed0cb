//! Logical/physical volume hierarchy and its rollout into touchables.
//!
//! The hierarchy lives in an arena ([`Geometry`]); logical volumes own their
//! daughter placements, so one logical volume placed twice shares its subtree.

mod attributes;
pub mod file;
pub mod fixtures;
mod mass;
mod vis;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::Axis;
use crate::solids::SolidError;
use crate::{Solid, Transform, Vec3};

pub use attributes::touchable_att_defs;
pub use mass::MassNode;
pub use vis::{ForcedStyle, LineStyle, VisAttributes, VisPatch};

/// Rollouts deeper than this are assumed to be cyclic.
pub const MAX_DEPTH: usize = 64;

/// Slack allowed when checking that a daughter fits its mother's bounding box.
pub const FIT_SLACK_MM: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("{kind} \"{name}\" is already defined")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} \"{name}\"")]
    Unknown { kind: &'static str, name: String },
    #[error("material \"{name}\": {reason}")]
    InvalidMaterial { name: String, reason: String },
    #[error("the world volume is already placed")]
    WorldAlreadySet,
    #[error("no world volume has been placed")]
    NoWorld,
    #[error("daughter \"{daughter}\" does not fit inside the bounding box of mother \"{mother}\"")]
    DaughterOutsideMother { daughter: String, mother: String },
    #[error("placing \"{daughter}\" inside \"{mother}\" would create a containment cycle")]
    Cycle { daughter: String, mother: String },
    #[error("rollout exceeded depth {max}; the hierarchy is probably cyclic")]
    DepthOverflow { max: usize },
    #[error("replica \"{name}\": {reason}")]
    InvalidReplica { name: String, reason: String },
    #[error("\"{volume}\" has negative daughter-subtracted volume {ds_volume_mm3} mm3; daughters overlap")]
    NegativeVolume { volume: String, ds_volume_mm3: f64 },
    #[error(transparent)]
    Solid(#[from] SolidError),
    #[error("geometry file: {0}")]
    File(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaterialId(pub usize);
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalId(pub usize);
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhysicalId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaterialState {
    Undefined,
    Solid,
    Liquid,
    Gas,
}

impl fmt::Display for MaterialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaterialState::Undefined => "undefined",
            MaterialState::Solid => "solid",
            MaterialState::Liquid => "liquid",
            MaterialState::Gas => "gas",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Material {
    pub name: String,
    /// Internal units, g/mm³.
    pub density: f64,
    pub state: MaterialState,
    /// Radiation length in mm, when known.
    pub radiation_length: Option<f64>,
}

impl Material {
    pub fn new(name: impl Into<String>, density: f64, state: MaterialState) -> Result<Self, GeometryError> {
        let name = name.into();
        let needs_density = state != MaterialState::Undefined;
        if !density.is_finite() || density < 0.0 || (needs_density && density <= 0.0) {
            return Err(GeometryError::InvalidMaterial { name, reason: format!("bad density {density}") });
        }
        Ok(Self { name, density, state, radiation_length: None })
    }

    pub fn with_radiation_length(mut self, mm: f64) -> Self {
        self.radiation_length = Some(mm);
        self
    }
}

#[derive(Clone, Debug)]
pub struct LogicalVolume {
    pub name: String,
    pub solid: Arc<Solid>,
    pub material: MaterialId,
    /// Attributes set on this volume; unset fields fall back to the global default.
    pub vis: VisPatch,
    pub daughters: Vec<PhysicalId>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Placement {
    Single {
        copy_no: i32,
    },
    /// `count` slices of `width` along `axis`, centred on the mother's origin.
    Replica {
        axis: Axis,
        count: usize,
        width: f64,
    },
}

#[derive(Clone, Debug)]
pub struct PhysicalVolume {
    pub name: String,
    pub logical: LogicalId,
    pub mother: Option<LogicalId>,
    pub transform: Transform,
    pub placement: Placement,
}

impl PhysicalVolume {
    pub fn copy_numbers(&self) -> Vec<i32> {
        match self.placement {
            Placement::Single { copy_no } => vec![copy_no],
            Placement::Replica { count, .. } => (0..count as i32).collect(),
        }
    }

    pub fn multiplicity(&self) -> usize {
        match self.placement {
            Placement::Single { .. } => 1,
            Placement::Replica { count, .. } => count,
        }
    }

    pub fn is_replica(&self) -> bool {
        matches!(self.placement, Placement::Replica { .. })
    }

    /// Local-to-mother transform of one copy.
    pub fn copy_transform(&self, copy: i32) -> Transform {
        match self.placement {
            Placement::Single { .. } => self.transform,
            Placement::Replica { axis, count, width } => {
                let offset = (copy as f64 - (count as f64 - 1.0) / 2.0) * width;
                Transform::translation(axis.unit::<f64>() * offset).compose(&self.transform)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathElement {
    pub name: String,
    pub copy: i32,
}

impl PathElement {
    pub fn new(name: impl Into<String>, copy: i32) -> Self {
        Self { name: name.into(), copy }
    }
}

/// Renders a path as `/World:0/Envelope:0`.
pub fn path_string(path: &[PathElement]) -> String {
    path.iter().map(|e| format!("/{}:{}", e.name, e.copy)).collect()
}

/// One placement instance of a volume in world coordinates.
#[derive(Clone, Debug)]
pub struct Touchable {
    pub path: Vec<PathElement>,
    pub physical: PhysicalId,
    pub logical: LogicalId,
    pub world_transform: Transform,
    pub solid: Arc<Solid>,
    pub vis: VisAttributes,
    pub depth: usize,
}

impl Touchable {
    pub fn name(&self) -> &str {
        &self.path.last().expect("touchable path is never empty").name
    }

    pub fn copy_no(&self) -> i32 {
        self.path.last().expect("touchable path is never empty").copy
    }

    pub fn path_string(&self) -> String {
        path_string(&self.path)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Geometry {
    materials: Vec<Material>,
    logicals: Vec<LogicalVolume>,
    physicals: Vec<PhysicalVolume>,
    world: Option<PhysicalId>,
    touchable_overrides: BTreeMap<Vec<PathElement>, VisPatch>,
}

impl Geometry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_material(&mut self, m: Material) -> Result<MaterialId, GeometryError> {
        if self.material_by_name(&m.name).is_some() {
            return Err(GeometryError::Duplicate { kind: "material", name: m.name });
        }
        self.materials.push(m);
        Ok(MaterialId(self.materials.len() - 1))
    }

    pub fn add_logical(
        &mut self,
        name: impl Into<String>,
        solid: Solid,
        material: MaterialId,
    ) -> Result<LogicalId, GeometryError> {
        let name = name.into();
        if self.logical_by_name(&name).is_some() {
            return Err(GeometryError::Duplicate { kind: "logical volume", name });
        }
        if material.0 >= self.materials.len() {
            return Err(GeometryError::Unknown { kind: "material", name: format!("#{}", material.0) });
        }
        self.logicals.push(LogicalVolume {
            name,
            solid: Arc::new(solid),
            material,
            vis: VisPatch::default(),
            daughters: Vec::new(),
        });
        Ok(LogicalId(self.logicals.len() - 1))
    }

    /// Places the top volume. Its physical name doubles as the root of every path.
    pub fn set_world(&mut self, name: impl Into<String>, logical: LogicalId) -> Result<PhysicalId, GeometryError> {
        if self.world.is_some() {
            return Err(GeometryError::WorldAlreadySet);
        }
        self.physicals.push(PhysicalVolume {
            name: name.into(),
            logical,
            mother: None,
            transform: Transform::identity(),
            placement: Placement::Single { copy_no: 0 },
        });
        let id = PhysicalId(self.physicals.len() - 1);
        self.world = Some(id);
        Ok(id)
    }

    /// Places `daughter` inside `mother` with a single rigid transform.
    pub fn place(
        &mut self,
        mother: LogicalId,
        name: impl Into<String>,
        daughter: LogicalId,
        transform: Transform,
        copy_no: i32,
    ) -> Result<PhysicalId, GeometryError> {
        let pv = PhysicalVolume {
            name: name.into(),
            logical: daughter,
            mother: Some(mother),
            transform,
            placement: Placement::Single { copy_no },
        };
        self.attach(pv)
    }

    /// Places `count` slices of `daughter`, each `width` thick along `axis`.
    pub fn place_replica(
        &mut self,
        mother: LogicalId,
        name: impl Into<String>,
        daughter: LogicalId,
        axis: Axis,
        count: usize,
        width: f64,
    ) -> Result<PhysicalId, GeometryError> {
        let name = name.into();
        if count == 0 || !(width > 0.0) || !width.is_finite() {
            return Err(GeometryError::InvalidReplica {
                name,
                reason: format!("need count ≥ 1 and width > 0, got count {count}, width {width}"),
            });
        }
        let mother_box = self.logicals[mother.0].solid.bounding_box();
        let span = mother_box.size().axis(axis);
        if count as f64 * width > span + FIT_SLACK_MM {
            return Err(GeometryError::InvalidReplica {
                name,
                reason: format!("{count} slices of {width} mm exceed the mother's extent of {span} mm"),
            });
        }
        let pv = PhysicalVolume {
            name,
            logical: daughter,
            mother: Some(mother),
            transform: Transform::identity(),
            placement: Placement::Replica { axis, count, width },
        };
        self.attach(pv)
    }

    fn attach(&mut self, pv: PhysicalVolume) -> Result<PhysicalId, GeometryError> {
        let mother = pv.mother.expect("daughters always have a mother");
        let (m, d) = (mother.0, pv.logical.0);
        if m >= self.logicals.len() || d >= self.logicals.len() {
            return Err(GeometryError::Unknown { kind: "logical volume", name: format!("#{}", m.max(d)) });
        }
        let (mother_name, daughter_name) = (self.logicals[m].name.clone(), self.logicals[d].name.clone());
        if self.reaches(pv.logical, mother) {
            return Err(GeometryError::Cycle { daughter: daughter_name, mother: mother_name });
        }
        let mother_box = self.logicals[m].solid.bounding_box();
        let daughter_box = self.logicals[d].solid.bounding_box();
        for copy in pv.copy_numbers() {
            let placed = daughter_box.transformed(&pv.copy_transform(copy));
            if !mother_box.contains_box(&placed, FIT_SLACK_MM) {
                return Err(GeometryError::DaughterOutsideMother { daughter: pv.name, mother: mother_name });
            }
        }
        self.physicals.push(pv);
        let id = PhysicalId(self.physicals.len() - 1);
        self.logicals[m].daughters.push(id);
        Ok(id)
    }

    /// True if `target` is `from` or lies below it.
    fn reaches(&self, from: LogicalId, target: LogicalId) -> bool {
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(l) = stack.pop() {
            if l == target {
                return true;
            }
            if seen.insert(l) {
                stack.extend(self.logicals[l.0].daughters.iter().map(|p| self.physicals[p.0].logical));
            }
        }
        false
    }

    pub fn world(&self) -> Option<PhysicalId> {
        self.world
    }

    pub fn material(&self, id: MaterialId) -> &Material {
        &self.materials[id.0]
    }

    pub fn logical(&self, id: LogicalId) -> &LogicalVolume {
        &self.logicals[id.0]
    }

    pub fn physical(&self, id: PhysicalId) -> &PhysicalVolume {
        &self.physicals[id.0]
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn logicals(&self) -> impl Iterator<Item = (LogicalId, &LogicalVolume)> {
        self.logicals.iter().enumerate().map(|(i, l)| (LogicalId(i), l))
    }

    pub fn physicals(&self) -> impl Iterator<Item = (PhysicalId, &PhysicalVolume)> {
        self.physicals.iter().enumerate().map(|(i, p)| (PhysicalId(i), p))
    }

    pub fn material_by_name(&self, name: &str) -> Option<MaterialId> {
        self.materials.iter().position(|m| m.name == name).map(MaterialId)
    }

    pub fn logical_by_name(&self, name: &str) -> Option<LogicalId> {
        self.logicals.iter().position(|l| l.name == name).map(LogicalId)
    }

    pub fn touchable_overrides(&self) -> &BTreeMap<Vec<PathElement>, VisPatch> {
        &self.touchable_overrides
    }

    fn effective_vis(&self, logical: LogicalId, path: &[PathElement]) -> VisAttributes {
        let mut vis = VisAttributes::default();
        self.logicals[logical.0].vis.apply_to(&mut vis);
        if let Some(o) = self.touchable_overrides.get(path) {
            o.apply_to(&mut vis);
        }
        vis
    }

    /// The world touchable.
    pub fn world_touchable(&self) -> Result<Touchable, GeometryError> {
        let w = self.world.ok_or(GeometryError::NoWorld)?;
        let pv = &self.physicals[w.0];
        let path = vec![PathElement::new(pv.name.clone(), 0)];
        Ok(self.make_touchable(w, path, pv.transform))
    }

    fn make_touchable(&self, physical: PhysicalId, path: Vec<PathElement>, world_transform: Transform) -> Touchable {
        let logical = self.physicals[physical.0].logical;
        Touchable {
            vis: self.effective_vis(logical, &path),
            depth: path.len() - 1,
            path,
            physical,
            logical,
            world_transform,
            solid: Arc::clone(&self.logicals[logical.0].solid),
        }
    }

    /// Depth-first pre-order rollout from the world. `depth_limit` of `None` is unlimited.
    pub fn descend(&self, depth_limit: Option<usize>, cull_invisible: bool) -> Result<Vec<Touchable>, GeometryError> {
        let root = self.world_touchable()?;
        self.descend_from(&root, depth_limit, cull_invisible)
    }

    /// Rollout of the subtree below `root`; `depth_limit` counts levels below `root`.
    pub fn descend_from(
        &self,
        root: &Touchable,
        depth_limit: Option<usize>,
        cull_invisible: bool,
    ) -> Result<Vec<Touchable>, GeometryError> {
        let mut out = Vec::new();
        self.visit(root.clone(), 0, depth_limit, cull_invisible, &mut out)?;
        Ok(out)
    }

    fn visit(
        &self,
        t: Touchable,
        level: usize,
        depth_limit: Option<usize>,
        cull: bool,
        out: &mut Vec<Touchable>,
    ) -> Result<(), GeometryError> {
        if t.depth > MAX_DEPTH {
            return Err(GeometryError::DepthOverflow { max: MAX_DEPTH });
        }
        let skip_daughters = cull && t.vis.daughters_invisible;
        let descend = depth_limit.is_none_or(|d| level < d) && !skip_daughters;
        let (logical, transform, path) = (t.logical, t.world_transform, t.path.clone());
        if !(cull && !t.vis.visible) {
            out.push(t);
        }
        if !descend {
            return Ok(());
        }
        for &d in &self.logicals[logical.0].daughters {
            let pv = &self.physicals[d.0];
            for copy in pv.copy_numbers() {
                let mut p = path.clone();
                p.push(PathElement::new(pv.name.clone(), copy));
                let child = self.make_touchable(d, p, transform.compose(&pv.copy_transform(copy)));
                self.visit(child, level + 1, depth_limit, cull, out)?;
            }
        }
        Ok(())
    }

    /// First touchable (pre-order) whose physical volume has `name` and, if given, `copy`.
    pub fn find_touchable(&self, name: &str, copy: Option<i32>) -> Result<Option<Touchable>, GeometryError> {
        Ok(self.descend(None, false)?.into_iter().find(|t| t.name() == name && copy.is_none_or(|c| t.copy_no() == c)))
    }

    /// Applies `patch` to the named logical volume; `depth > 0` also patches the
    /// logical volumes of daughters down that many levels, negative is unlimited.
    /// Returns the number of logical volumes changed, zero when the name is unknown.
    pub fn set_logical_vis(&mut self, name: &str, depth: i32, patch: &VisPatch) -> usize {
        let Some(root) = self.logical_by_name(name) else {
            log::warn!("no logical volume named \"{name}\"");
            return 0;
        };
        let mut changed = HashSet::new();
        let mut frontier = vec![(root, 0i32)];
        while let Some((l, d)) = frontier.pop() {
            if !changed.insert(l) {
                continue;
            }
            self.logicals[l.0].vis.merge(patch);
            if depth < 0 || d < depth {
                for p in &self.logicals[l.0].daughters {
                    frontier.push((self.physicals[p.0].logical, d + 1));
                }
            }
        }
        changed.len()
    }

    /// Records a per-placement override. Returns 1, or 0 when no placement matches the path.
    pub fn set_touchable_vis(&mut self, path: &[PathElement], patch: &VisPatch) -> usize {
        if !self.path_exists(path) {
            log::warn!("no touchable at path \"{}\"", path_string(path));
            return 0;
        }
        self.touchable_overrides.entry(path.to_vec()).or_default().merge(patch);
        1
    }

    pub fn clear_touchable_overrides(&mut self) {
        self.touchable_overrides.clear();
    }

    pub fn path_exists(&self, path: &[PathElement]) -> bool {
        self.resolve_path(path).is_some()
    }

    /// Touchable at an exact path, if it exists.
    pub fn resolve_path(&self, path: &[PathElement]) -> Option<Touchable> {
        let w = self.world?;
        let (first, rest) = path.split_first()?;
        let world = &self.physicals[w.0];
        if first.name != world.name || first.copy != 0 {
            return None;
        }
        let mut current = w;
        let mut transform = world.transform;
        for e in rest {
            let lv = &self.logicals[self.physicals[current.0].logical.0];
            let (id, pv) = lv
                .daughters
                .iter()
                .map(|d| (*d, &self.physicals[d.0]))
                .find(|(_, pv)| pv.name == e.name && pv.copy_numbers().contains(&e.copy))?;
            transform = transform.compose(&pv.copy_transform(e.copy));
            current = id;
        }
        Some(self.make_touchable(current, path.to_vec(), transform))
    }

    /// Bounding radius of the world about the origin, in mm.
    pub fn world_extent(&self) -> Option<(Vec3, f64)> {
        let w = self.world?;
        let b = self.logicals[self.physicals[w.0].logical.0].solid.bounding_box();
        Some((b.centre(), b.bounding_radius()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour::Colour;
    use crate::units::{CM, G_PER_CM3};

    fn boxed(name: &str, h: f64) -> Solid {
        Solid::new_box(name, h, h, h).unwrap()
    }

    fn replica_world() -> Geometry {
        let mut g = Geometry::new();
        let m = g.add_material(Material::new("m", G_PER_CM3, MaterialState::Solid).unwrap()).unwrap();
        let w = g.add_logical("W", Solid::new_box("W", 50.0, 10.0, 10.0).unwrap(), m).unwrap();
        let s = g.add_logical("S", Solid::new_box("S", 5.0, 10.0, 10.0).unwrap(), m).unwrap();
        g.set_world("W", w).unwrap();
        g.place_replica(w, "Slice", s, Axis::X, 5, 10.0).unwrap();
        g
    }

    #[test]
    fn b1_rollout_order() {
        let g = fixtures::b1();
        let names: Vec<_> = g.descend(None, false).unwrap().iter().map(|t| t.name().to_string()).collect();
        assert_eq!(names, ["World", "Envelope", "Shape1", "Shape2"]);
        assert_eq!(g.descend(Some(0), false).unwrap().len(), 1);
        assert_eq!(g.descend(Some(1), false).unwrap().len(), 2);
    }

    #[test]
    fn replica_expansion() {
        let g = replica_world();
        let ts = g.descend(None, false).unwrap();
        assert_eq!(ts.len(), 6);
        let xs: Vec<f64> = ts[1..].iter().map(|t| t.world_transform.translation.x).collect();
        assert_eq!(xs, [-20.0, -10.0, 0.0, 10.0, 20.0]);
        let copies: Vec<i32> = ts[1..].iter().map(|t| t.copy_no()).collect();
        assert_eq!(copies, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn replica_must_fit() {
        let mut g = replica_world();
        let s = g.logical_by_name("S").unwrap();
        let w = g.logical_by_name("W").unwrap();
        assert!(matches!(g.place_replica(w, "Too", s, Axis::X, 11, 10.0), Err(GeometryError::InvalidReplica { .. })));
    }

    #[test]
    fn culling_rules() {
        let mut g = fixtures::b1();
        let hide = VisPatch { visible: Some(false), ..Default::default() };
        assert_eq!(g.set_logical_vis("World", 0, &hide), 1);
        assert_eq!(g.set_logical_vis("Envelope", 0, &hide), 1);
        assert_eq!(g.set_logical_vis("NoSuchVolume", 0, &hide), 0);
        let culled: Vec<_> = g.descend(None, true).unwrap().iter().map(|t| t.name().to_string()).collect();
        assert_eq!(culled, ["Shape1", "Shape2"]);
        assert_eq!(g.descend(None, false).unwrap().len(), 4);
        let di = VisPatch { daughters_invisible: Some(true), ..Default::default() };
        g.set_logical_vis("Envelope", 0, &di);
        assert!(g.descend(None, true).unwrap().is_empty());
    }

    #[test]
    fn logical_vis_depth_propagates() {
        let mut g = fixtures::b1();
        let red = VisPatch { colour: Some(Colour::RED), ..Default::default() };
        assert_eq!(g.set_logical_vis("World", 1, &red), 2);
        assert_eq!(g.set_logical_vis("World", -1, &red), 4);
    }

    #[test]
    fn touchable_override_precedence() {
        let mut g = replica_world();
        let blue = VisPatch { colour: Some(Colour::BLUE), ..Default::default() };
        let red = VisPatch { colour: Some(Colour::RED), ..Default::default() };
        g.set_logical_vis("S", 0, &blue);
        let path = [PathElement::new("W", 0), PathElement::new("Slice", 3)];
        assert_eq!(g.set_touchable_vis(&path, &red), 1);
        assert_eq!(g.set_touchable_vis(&[PathElement::new("W", 0), PathElement::new("Slice", 7)], &red), 0);
        let colours: Vec<Colour> = g.descend(None, false).unwrap()[1..].iter().map(|t| t.vis.colour).collect();
        assert_eq!(colours, [Colour::BLUE, Colour::BLUE, Colour::BLUE, Colour::RED, Colour::BLUE]);
    }

    #[test]
    fn placement_checks() {
        let mut g = Geometry::new();
        let m = g.add_material(Material::new("m", G_PER_CM3, MaterialState::Solid).unwrap()).unwrap();
        let a = g.add_logical("A", boxed("A", 10.0), m).unwrap();
        let b = g.add_logical("B", boxed("B", 2.0), m).unwrap();
        g.set_world("A", a).unwrap();
        let far = Transform::translation(Vec3::new(9.0, 0.0, 0.0));
        assert!(matches!(g.place(a, "B", b, far, 0), Err(GeometryError::DaughterOutsideMother { .. })));
        g.place(a, "B", b, Transform::identity(), 0).unwrap();
        assert!(matches!(g.place(b, "A", a, Transform::identity(), 0), Err(GeometryError::Cycle { .. })));
        assert!(matches!(g.place(b, "B2", b, Transform::identity(), 0), Err(GeometryError::Cycle { .. })));
        assert!(matches!(g.add_logical("A", boxed("A", 1.0), m), Err(GeometryError::Duplicate { .. })));
    }

    #[test]
    fn resolve_and_transforms() {
        let g = fixtures::b1();
        let path = [PathElement::new("World", 0), PathElement::new("Envelope", 0), PathElement::new("Shape2", 0)];
        let t = g.resolve_path(&path).unwrap();
        assert_eq!(t.world_transform.translation, Vec3::new(0.0, -CM, 7.0 * CM));
        assert_eq!(t.path_string(), "/World:0/Envelope:0/Shape2:0");
        assert!(g.resolve_path(&path[1..]).is_none());
    }
}
