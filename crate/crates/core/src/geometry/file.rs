//! Declarative JSON geometry description. See `docs/geometry-format.md`.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::colour::Colour;
use crate::math::{Axis, Mat3};
use crate::units::{DEG, G_PER_CM3};
use crate::{Solid, Transform, Vec3};

use super::{ForcedStyle, Geometry, GeometryError, LineStyle, Material, MaterialState, VisPatch};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    materials: Vec<MaterialSpec>,
    solids: Vec<SolidSpec>,
    volumes: Vec<VolumeSpec>,
    world: String,
    #[serde(default)]
    placements: Vec<PlacementSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSpec {
    name: String,
    density_g_cm3: f64,
    state: MaterialState,
    #[serde(default)]
    radlen_mm: Option<f64>,
}

fn zero() -> f64 {
    0.0
}
fn full_circle() -> f64 {
    360.0
}
fn half_circle() -> f64 {
    180.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum SolidSpec {
    Box {
        name: String,
        half_x_mm: f64,
        half_y_mm: f64,
        half_z_mm: f64,
    },
    Tube {
        name: String,
        #[serde(default = "zero")]
        r_min_mm: f64,
        r_max_mm: f64,
        half_z_mm: f64,
        #[serde(default = "zero")]
        phi_start_deg: f64,
        #[serde(default = "full_circle")]
        delta_phi_deg: f64,
    },
    Cone {
        name: String,
        #[serde(default = "zero")]
        r_min1_mm: f64,
        r_max1_mm: f64,
        #[serde(default = "zero")]
        r_min2_mm: f64,
        r_max2_mm: f64,
        half_z_mm: f64,
        #[serde(default = "zero")]
        phi_start_deg: f64,
        #[serde(default = "full_circle")]
        delta_phi_deg: f64,
    },
    Trd {
        name: String,
        half_x1_mm: f64,
        half_x2_mm: f64,
        half_y1_mm: f64,
        half_y2_mm: f64,
        half_z_mm: f64,
    },
    Sphere {
        name: String,
        #[serde(default = "zero")]
        r_min_mm: f64,
        r_max_mm: f64,
        #[serde(default = "zero")]
        phi_start_deg: f64,
        #[serde(default = "full_circle")]
        delta_phi_deg: f64,
        #[serde(default = "zero")]
        theta_start_deg: f64,
        #[serde(default = "half_circle")]
        delta_theta_deg: f64,
    },
    Subtraction {
        name: String,
        left: String,
        right: String,
        #[serde(default)]
        translation_mm: [f64; 3],
        #[serde(default)]
        rotation_deg: [f64; 3],
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VisSpec {
    visible: Option<bool>,
    colour: Option<Vec<f64>>,
    line_width: Option<f64>,
    line_style: Option<LineStyle>,
    forced_style: Option<ForcedStyle>,
    daughters_invisible: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeSpec {
    name: String,
    solid: String,
    material: String,
    #[serde(default)]
    vis: Option<VisSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReplicaSpec {
    axis: Axis,
    count: usize,
    width_mm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementSpec {
    name: String,
    volume: String,
    mother: String,
    #[serde(default)]
    translation_mm: [f64; 3],
    #[serde(default)]
    rotation_deg: [f64; 3],
    #[serde(default)]
    copy: i32,
    #[serde(default)]
    replica: Option<ReplicaSpec>,
}

/// Rotation about x, then y, then z.
fn transform(translation: [f64; 3], rotation_deg: [f64; 3]) -> Transform {
    let [rx, ry, rz] = rotation_deg.map(|a| a * DEG);
    let r = Mat3::rotation_z(rz).mul_mat(&Mat3::rotation_y(ry)).mul_mat(&Mat3::rotation_x(rx));
    Transform::new(r, Vec3::from_f64(translation))
}

fn err(msg: impl Into<String>) -> GeometryError {
    GeometryError::File(msg.into())
}

impl SolidSpec {
    fn name(&self) -> &str {
        match self {
            SolidSpec::Box { name, .. }
            | SolidSpec::Tube { name, .. }
            | SolidSpec::Cone { name, .. }
            | SolidSpec::Trd { name, .. }
            | SolidSpec::Sphere { name, .. }
            | SolidSpec::Subtraction { name, .. } => name,
        }
    }

    fn build(&self, known: &HashMap<String, Solid>) -> Result<Solid, GeometryError> {
        Ok(match self {
            SolidSpec::Box { name, half_x_mm, half_y_mm, half_z_mm } => {
                Solid::new_box(name, *half_x_mm, *half_y_mm, *half_z_mm)?
            }
            SolidSpec::Tube { name, r_min_mm, r_max_mm, half_z_mm, phi_start_deg, delta_phi_deg } => {
                Solid::new_tube(name, *r_min_mm, *r_max_mm, *half_z_mm, phi_start_deg * DEG, delta_phi_deg * DEG)?
            }
            SolidSpec::Cone {
                name,
                r_min1_mm,
                r_max1_mm,
                r_min2_mm,
                r_max2_mm,
                half_z_mm,
                phi_start_deg,
                delta_phi_deg,
            } => Solid::new_cone(
                name,
                *r_min1_mm,
                *r_max1_mm,
                *r_min2_mm,
                *r_max2_mm,
                *half_z_mm,
                phi_start_deg * DEG,
                delta_phi_deg * DEG,
            )?,
            SolidSpec::Trd { name, half_x1_mm, half_x2_mm, half_y1_mm, half_y2_mm, half_z_mm } => {
                Solid::new_trd(name, *half_x1_mm, *half_x2_mm, *half_y1_mm, *half_y2_mm, *half_z_mm)?
            }
            SolidSpec::Sphere {
                name,
                r_min_mm,
                r_max_mm,
                phi_start_deg,
                delta_phi_deg,
                theta_start_deg,
                delta_theta_deg,
            } => Solid::new_sphere(
                name,
                *r_min_mm,
                *r_max_mm,
                phi_start_deg * DEG,
                delta_phi_deg * DEG,
                theta_start_deg * DEG,
                delta_theta_deg * DEG,
            )?,
            SolidSpec::Subtraction { name, left, right, translation_mm, rotation_deg } => {
                let get = |n: &String| {
                    known
                        .get(n)
                        .cloned()
                        .ok_or_else(|| err(format!("solid \"{name}\" refers to undefined solid \"{n}\"")))
                };
                Solid::new_subtraction(name, get(left)?, get(right)?, transform(*translation_mm, *rotation_deg))?
            }
        })
    }
}

impl VisSpec {
    fn patch(&self) -> Result<VisPatch, GeometryError> {
        let colour = match self.colour.as_deref() {
            None => None,
            Some([r, g, b]) => Some(Colour::new(*r, *g, *b, 1.0)),
            Some([r, g, b, a]) => Some(Colour::new(*r, *g, *b, *a)),
            Some(other) => return Err(err(format!("colour needs 3 or 4 components, got {}", other.len()))),
        };
        Ok(VisPatch {
            visible: self.visible,
            colour,
            line_width: self.line_width,
            line_style: self.line_style,
            forced_style: self.forced_style,
            daughters_invisible: self.daughters_invisible,
        })
    }
}

impl Geometry {
    pub fn from_json_str(text: &str) -> Result<Geometry, GeometryError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let mut g = Geometry::new();
        for m in &doc.materials {
            let mut mat = Material::new(m.name.clone(), m.density_g_cm3 * G_PER_CM3, m.state)?;
            mat.radiation_length = m.radlen_mm;
            g.add_material(mat)?;
        }
        let mut solids: HashMap<String, Solid> = HashMap::new();
        for s in &doc.solids {
            if solids.contains_key(s.name()) {
                return Err(GeometryError::Duplicate { kind: "solid", name: s.name().to_string() });
            }
            let built = s.build(&solids)?;
            solids.insert(s.name().to_string(), built);
        }
        for v in &doc.volumes {
            let solid = solids
                .get(&v.solid)
                .cloned()
                .ok_or_else(|| GeometryError::Unknown { kind: "solid", name: v.solid.clone() })?;
            let material = g
                .material_by_name(&v.material)
                .ok_or_else(|| GeometryError::Unknown { kind: "material", name: v.material.clone() })?;
            let id = g.add_logical(v.name.clone(), solid, material)?;
            if let Some(vis) = &v.vis {
                g.logicals[id.0].vis = vis.patch()?;
            }
        }
        let lookup = |g: &Geometry, name: &str| {
            g.logical_by_name(name).ok_or_else(|| GeometryError::Unknown { kind: "logical volume", name: name.into() })
        };
        g.set_world(doc.world.clone(), lookup(&g, &doc.world)?)?;
        for p in &doc.placements {
            let (mother, daughter) = (lookup(&g, &p.mother)?, lookup(&g, &p.volume)?);
            match &p.replica {
                Some(r) => g.place_replica(mother, p.name.clone(), daughter, r.axis, r.count, r.width_mm)?,
                None => {
                    g.place(mother, p.name.clone(), daughter, transform(p.translation_mm, p.rotation_deg), p.copy)?
                }
            };
        }
        Ok(g)
    }

    pub fn from_json_file(path: &Path) -> Result<Geometry, GeometryError> {
        let text = std::fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }
}
