use std::collections::HashSet;
use std::fmt::Write as _;

use crate::att::AttValue;
use crate::colour::Colour;
use crate::events::{DrawStyle, FilterChain, Hit, Trajectory, TrajectoryModel};
use crate::geometry::{Geometry, LogicalId, PathElement, Touchable, VisAttributes};
use crate::scene::{traverse, Model, Primitive, Scene, SceneError, TraversalContext};
use crate::units::{best_unit, Category};
use crate::view::ViewParameters;
use crate::{Solid, Transform};

use super::{SceneSink, SinkError, SolidOrigin};

/// Verbosity at and above which every physical volume is printed.
pub const PRINT_ALL_VERBOSITY: i32 = 10;

/// Text dump of the geometry tree, with optional volume and mass columns.
pub struct AsciiTree<'g> {
    geometry: &'g Geometry,
    verbosity: i32,
    out: String,
    seen_logicals: HashSet<LogicalId>,
    /// Paths whose descendants are not printed.
    collapsed: Vec<Vec<PathElement>>,
    /// Top touchables of the session with the deepest relative depth seen below each.
    roots: Vec<(Touchable, usize)>,
}

fn is_prefix(prefix: &[PathElement], path: &[PathElement]) -> bool {
    path.len() > prefix.len() && path[..prefix.len()] == *prefix
}

fn quoted(name: &str) -> String {
    format!("\"{name}\"")
}

impl<'g> AsciiTree<'g> {
    pub fn new(geometry: &'g Geometry, verbosity: i32) -> Self {
        Self {
            geometry,
            verbosity,
            out: String::new(),
            seen_logicals: HashSet::new(),
            collapsed: Vec::new(),
            roots: Vec::new(),
        }
    }

    pub fn text(&self) -> &str {
        &self.out
    }

    pub fn into_text(self) -> String {
        self.out
    }

    fn header(&mut self) {
        let v = self.verbosity;
        let lines = [
            "#  Set verbosity with \"/vis/ASCIITree/verbose <verbosity>\":".to_string(),
            "#    <  10: does not print daughters of repeated placements, does not repeat replicas.".into(),
            "#    >= 10: prints all physical volumes.".into(),
            "#  The level of detail is given by verbosity for each volume:".into(),
            "#    >=  0: physical volume name.".into(),
            "#    >=  1: logical volume name.".into(),
            "#    >=  2: solid name and type.".into(),
            "#    >=  3: volume and density.".into(),
            "#    >=  5: daughter-subtracted volume and mass.".into(),
            "#  and in the summary at the end of printing:".into(),
            "#    >=  4: daughter-included mass of top physical volume(s) in scene to depth specified.".into(),
            format!("#  Now printing with verbosity {v}"),
            "#  Format is: PV:n / LV / Solid(type), volume, density, daughter-subtracted volume and mass".into(),
        ];
        for l in lines {
            self.out.push_str(&l);
            self.out.push('\n');
        }
    }

    fn touchable(&mut self, t: &Touchable) -> Result<(), SinkError> {
        let g = self.geometry;
        match self.roots.iter_mut().find(|(r, _)| is_prefix(&r.path, &t.path)) {
            Some((r, deepest)) => *deepest = (*deepest).max(t.depth - r.depth),
            None => self.roots.push((t.clone(), 0)),
        }
        if self.collapsed.iter().any(|c| is_prefix(c, &t.path)) {
            return Ok(());
        }
        let pv = g.physical(t.physical);
        if self.verbosity < PRINT_ALL_VERBOSITY {
            if pv.is_replica() && Some(&t.copy_no()) != pv.copy_numbers().first() {
                self.collapsed.push(t.path.clone());
                return Ok(());
            }
            if !self.seen_logicals.insert(t.logical) {
                self.collapsed.push(t.path.clone());
            }
        }
        let lv = g.logical(t.logical);
        let mut line = format!("{}{}:{}", "  ".repeat(t.depth), quoted(t.name()), t.copy_no());
        if self.verbosity >= 1 {
            write!(line, " / {}", quoted(&lv.name)).unwrap();
        }
        if self.verbosity >= 2 {
            write!(line, " / {}({})", quoted(t.solid.name()), t.solid.type_name()).unwrap();
        }
        if self.verbosity >= 3 {
            let mat = g.material(lv.material);
            write!(
                line,
                ", {}, {} ({})",
                best_unit(t.solid.analytic_volume(), Category::Volume),
                best_unit(mat.density, Category::Density),
                mat.name
            )
            .unwrap();
        }
        if self.verbosity >= 5 {
            let node = g.compute_masses(t, Some(1)).map_err(|e| SinkError::Render(e.to_string()))?;
            write!(
                line,
                ", {}, {}",
                best_unit(node.daughter_subtracted_volume, Category::Volume),
                best_unit(node.mass, Category::Mass)
            )
            .unwrap();
        }
        self.out.push_str(&line);
        self.out.push('\n');
        Ok(())
    }

    fn summary(&mut self) -> Result<(), SinkError> {
        if self.verbosity < 4 || self.roots.is_empty() {
            return Ok(());
        }
        let g = self.geometry;
        self.out.push_str("Calculating mass(es)...\n");
        for (root, deepest) in std::mem::take(&mut self.roots) {
            let render = |e: crate::geometry::GeometryError| SinkError::Render(e.to_string());
            let full = g.descend_from(&root, None, false).map_err(render)?.iter().map(|t| t.depth - root.depth).max();
            let (limit, label) = if full == Some(deepest) {
                (None, "unlimited depth".to_string())
            } else {
                (Some(deepest), format!("depth {deepest}"))
            };
            let node = g.compute_masses(&root, limit).map_err(render)?;
            writeln!(
                self.out,
                "Overall volume of {}:{}, is {} and the daughter-included mass to {} is {}",
                quoted(root.name()),
                root.copy_no(),
                best_unit(node.volume, Category::Volume),
                label,
                best_unit(node.daughter_included_mass, Category::Mass)
            )
            .unwrap();
        }
        Ok(())
    }
}

impl SceneSink for AsciiTree<'_> {
    fn begin_session(&mut self, _view: &ViewParameters) -> Result<(), SinkError> {
        self.out.clear();
        self.seen_logicals.clear();
        self.collapsed.clear();
        self.roots.clear();
        self.header();
        Ok(())
    }

    fn pre_add_solid(&mut self, _: &Transform, _: &VisAttributes, origin: &SolidOrigin) -> Result<(), SinkError> {
        match origin {
            SolidOrigin::Touchable { touchable, .. } => self.touchable(touchable),
            SolidOrigin::User { .. } => Ok(()),
        }
    }

    fn add_solid(&mut self, _: &Solid) -> Result<(), SinkError> {
        Ok(())
    }
    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn begin_primitives(&mut self, _: &Transform) -> Result<(), SinkError> {
        Ok(())
    }
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_primitive(&mut self, _: &Primitive) -> Result<(), SinkError> {
        Ok(())
    }
    fn end_primitives(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_trajectory(&mut self, _: &Trajectory, _: &DrawStyle, _: &[AttValue]) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_hit(&mut self, _: &Hit, _: Colour, _: &[AttValue]) -> Result<(), SinkError> {
        Ok(())
    }

    fn end_session(&mut self) -> Result<(), SinkError> {
        self.summary()
    }
}

/// Dumps the whole geometry, culling off, at `verbosity`.
pub fn ascii_tree_render(geometry: &Geometry, verbosity: i32) -> Result<String, SceneError> {
    let mut scene = Scene::new("atree");
    scene.add_model(Model::PhysicalVolume { root: None, depth_limit: None }, geometry)?;
    let view = ViewParameters { culling_invisible: false, ..ViewParameters::default() };
    let (filters, model) = (FilterChain::default(), TrajectoryModel::by_charge("default"));
    let ctx = TraversalContext {
        geometry,
        view: &view,
        events: Vec::new(),
        filters: &filters,
        model: &model,
        date: String::new(),
        user_transients: &[],
    };
    let mut tree = AsciiTree::new(geometry, verbosity);
    traverse(&scene, &mut tree, &ctx)?;
    Ok(tree.into_text())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fixtures, Material, MaterialState};
    use crate::math::Axis;
    use crate::Vec3;

    fn body(text: &str) -> Vec<&str> {
        text.lines().filter(|l| !l.starts_with('#')).collect()
    }

    #[test]
    fn b1_full_verbosity() {
        let text = ascii_tree_render(&fixtures::b1(), 15).unwrap();
        let lines = body(&text);
        assert_eq!(
            lines[0],
            "\"World\":0 / \"World\" / \"World\"(G4Box), 20736 cm3, 1.20479 mg/cm3 (G4_AIR), 8736 cm3, 10.525 g"
        );
        assert!(lines[1].starts_with("  \"Envelope\":0"));
        assert!(lines[1].ends_with("12000 cm3, 1 g/cm3 (G4_WATER), 10888.1 cm3, 10.8881 kg"));
        assert!(lines[2].contains("175.929 cm3, 1.127 g/cm3") && lines[2].ends_with("198.272 g"));
        assert!(lines[3].starts_with("    \"Shape2\":0") && lines[3].ends_with("936 cm3, 1.7316 kg"));
        assert_eq!(lines[4], "Calculating mass(es)...");
        assert_eq!(
            lines[5],
            "Overall volume of \"World\":0, is 20736 cm3 and the daughter-included mass to unlimited depth is 12.8285 kg"
        );
    }

    #[test]
    fn verbosity_zero_is_names_only() {
        let text = ascii_tree_render(&fixtures::b1(), 0).unwrap();
        assert_eq!(body(&text), ["\"World\":0", "  \"Envelope\":0", "    \"Shape1\":0", "    \"Shape2\":0"]);
    }

    #[test]
    fn replicas_collapse_below_ten() {
        let mut g = fixtures::single_box(Vec3::new(50.0, 10.0, 10.0));
        let m = g.add_material(Material::new("Slab", 1e-3, MaterialState::Solid).unwrap()).unwrap();
        let slab = g.add_logical("Slab", Solid::new_box("Slab", 10.0, 10.0, 10.0).unwrap(), m).unwrap();
        let world = g.logical_by_name("Box").unwrap();
        g.place_replica(world, "Slab", slab, Axis::X, 5, 20.0).unwrap();
        let count = |v| body(&ascii_tree_render(&g, v).unwrap()).iter().filter(|l| l.contains("Slab")).count();
        assert_eq!(count(9), 1);
        assert_eq!(count(10), 5);
    }
}
