//! Multi-driver visualisation kernel.
//!
//! Geometry is described as a hierarchy of placed solids, rolled out into
//! touchables and delivered, together with event data and decorations, to any
//! of several drivers through one low-level sink interface.
//!
//! The solid kernel is generic over the scalar type; everything above it works
//! in `f64` through the aliases defined here.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod att;
pub mod colour;
pub mod drivers;
pub mod events;
pub mod geometry;
pub mod kernel;
pub mod math;
pub mod real;
pub mod scene;
pub mod shell;
pub mod solids;
pub mod units;
pub mod view;

pub type Vec3 = math::Vec3<f64>;
pub type Mat3 = math::Mat3<f64>;
pub type Transform = math::Transform3<f64>;
pub type Aabb = math::Aabb<f64>;
pub type Solid = solids::Solid<f64>;
pub type Mesh = solids::Mesh<f64>;
pub type Ray = solids::Ray<f64>;
pub type RayHit = solids::RayHit<f64>;
