use crate::att::{AttDef, AttDefSet, AttKind, AttValue};
use crate::units::{best_unit, best_unit_vec, format_g, Category};

use super::{Geometry, Touchable};

/// Attribute schema for touchables.
pub fn touchable_att_defs() -> AttDefSet {
    use AttKind::*;
    AttDefSet::new(
        "PhysicalVolumeModel",
        vec![
            AttDef::new("Density", "Material Density", Double, true),
            AttDef::new("DmpSol", "Dump of Solid properties", Text, false),
            AttDef::new("EType", "Entity Type", Text, false),
            AttDef::new("LVol", "Logical Volume", Text, false),
            AttDef::new("Material", "Material Name", Text, false),
            AttDef::new("PVPath", "Physical Volume Path", Text, false),
            AttDef::new("Radlen", "Material Radiation Length", Double, true),
            AttDef::new("Region", "Cuts Region", Text, false),
            AttDef::new("RootRegion", "Root Region (0/1 = false/true)", Bool, false),
            AttDef::new("Solid", "Solid Name", Text, false),
            AttDef::new("State", "Material State (enum undefined,solid,liquid,gas)", Text, false),
            AttDef::new("Trans", "Transformation of volume", Text, false),
        ],
    )
}

impl Geometry {
    /// Attribute values of a touchable, one per key of [`touchable_att_defs`].
    pub fn touchable_attributes(&self, t: &Touchable) -> Vec<AttValue> {
        let lv = self.logical(t.logical);
        let mat = self.material(lv.material);
        let r = &t.world_transform.rotation.rows;
        let row = |v: &crate::Vec3| format!("({}, {}, {})", format_g(v.x, 6), format_g(v.y, 6), format_g(v.z, 6));
        let trans = format!(
            "rotation ({}, {}, {}) translation {}",
            row(&r[0]),
            row(&r[1]),
            row(&r[2]),
            best_unit_vec(t.world_transform.translation.to_f64(), Category::Length)
        );
        vec![
            AttValue::new("Density", best_unit(mat.density, Category::Density)),
            AttValue::new("DmpSol", t.solid.to_string()),
            AttValue::new("EType", "Touchable"),
            AttValue::new("LVol", lv.name.clone()),
            AttValue::new("Material", mat.name.clone()),
            AttValue::new("PVPath", t.path_string()),
            AttValue::new(
                "Radlen",
                mat.radiation_length.map_or_else(|| "n/a".to_string(), |x| best_unit(x, Category::Length)),
            ),
            AttValue::new("Region", "n/a"),
            AttValue::new("RootRegion", if t.depth == 0 { "1" } else { "0" }),
            AttValue::new("Solid", t.solid.name().to_string()),
            AttValue::new("State", mat.state.to_string()),
            AttValue::new("Trans", trans),
        ]
    }
}
