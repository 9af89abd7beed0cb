//! Ready-made geometries for examples and tests.

use crate::units::{CM, G_PER_CM3, MG_PER_CM3};
use crate::{Solid, Transform, Vec3};

use super::{Geometry, GeometryError, Material, MaterialState};

/// The four-volume "B1" set-up: an air world holding a water envelope with a
/// tissue cone and a bone trapezoid inside.
pub fn b1() -> Geometry {
    try_b1().expect("fixture geometry is valid")
}

fn try_b1() -> Result<Geometry, GeometryError> {
    let mut g = Geometry::new();
    let air = g.add_material(Material::new("G4_AIR", 1.20479 * MG_PER_CM3, MaterialState::Gas)?)?;
    let water = g.add_material(Material::new("G4_WATER", 1.0 * G_PER_CM3, MaterialState::Liquid)?)?;
    let tissue = g.add_material(Material::new("G4_A-150_TISSUE", 1.127 * G_PER_CM3, MaterialState::Solid)?)?;
    let bone = g.add_material(Material::new("G4_BONE_COMPACT_ICRU", 1.85 * G_PER_CM3, MaterialState::Solid)?)?;

    let tau = std::f64::consts::TAU;
    let world = g.add_logical("World", Solid::new_box("World", 120.0, 120.0, 180.0)?, air)?;
    let env = g.add_logical("Envelope", Solid::new_box("Envelope", 100.0, 100.0, 150.0)?, water)?;
    let shape1 = g.add_logical("Shape1", Solid::new_cone("Shape1", 0.0, 20.0, 0.0, 40.0, 30.0, 0.0, tau)?, tissue)?;
    let shape2 = g.add_logical("Shape2", Solid::new_trd("Shape2", 60.0, 60.0, 50.0, 80.0, 30.0)?, bone)?;
    g.set_world("World", world)?;
    g.place(world, "Envelope", env, Transform::identity(), 0)?;
    g.place(env, "Shape1", shape1, Transform::translation(Vec3::new(0.0, 2.0 * CM, -7.0 * CM)), 0)?;
    g.place(env, "Shape2", shape2, Transform::translation(Vec3::new(0.0, -CM, 7.0 * CM)), 0)?;
    Ok(g)
}

/// A single box world of the given half-lengths filled with a dummy material.
pub fn single_box(half: Vec3) -> Geometry {
    let mut g = Geometry::new();
    let m = g
        .add_material(Material::new("G4_Galactic", 1e-25 * G_PER_CM3, MaterialState::Gas).expect("valid"))
        .expect("unique");
    let lv = g
        .add_logical("Box", Solid::new_box("Box", half.x, half.y, half.z).expect("positive half-lengths"), m)
        .expect("unique");
    g.set_world("Box", lv).expect("first world");
    g
}
