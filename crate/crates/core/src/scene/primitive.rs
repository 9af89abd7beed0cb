use crate::geometry::VisAttributes;
use crate::{Mesh, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkerKind {
    Dot,
    Circle,
    Square,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TextLayout {
    #[default]
    Left,
    Centre,
    Right,
}

/// The drawing vocabulary delivered to sinks between primitive brackets.
/// Positions are in the bracket's frame: world millimetres for 3D brackets,
/// viewport coordinates in `[-1, 1]` for 2D brackets (z ignored).
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Polyline {
        points: Vec<Vec3>,
        vis: VisAttributes,
    },
    Polymarker {
        points: Vec<Vec3>,
        kind: MarkerKind,
        size: f64,
        vis: VisAttributes,
    },
    Circle {
        position: Vec3,
        size: f64,
        vis: VisAttributes,
    },
    Square {
        position: Vec3,
        size: f64,
        vis: VisAttributes,
    },
    /// `size` in points (one point is one pixel); offsets in pixels.
    Text {
        position: Vec3,
        content: String,
        size: f64,
        layout: TextLayout,
        offset: (f64, f64),
        vis: VisAttributes,
    },
    Mesh {
        mesh: Mesh,
        vis: VisAttributes,
    },
    /// A ruler of `length` mm starting at `position` along `direction`.
    Scale {
        position: Vec3,
        length: f64,
        direction: Vec3,
        annotation: String,
        vis: VisAttributes,
    },
}

impl Primitive {
    pub fn vis(&self) -> &VisAttributes {
        match self {
            Primitive::Polyline { vis, .. }
            | Primitive::Polymarker { vis, .. }
            | Primitive::Circle { vis, .. }
            | Primitive::Square { vis, .. }
            | Primitive::Text { vis, .. }
            | Primitive::Mesh { vis, .. }
            | Primitive::Scale { vis, .. } => vis,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Primitive::Polyline { .. } => "polyline",
            Primitive::Polymarker { .. } => "polymarker",
            Primitive::Circle { .. } => "circle",
            Primitive::Square { .. } => "square",
            Primitive::Text { .. } => "text",
            Primitive::Mesh { .. } => "mesh",
            Primitive::Scale { .. } => "scale",
        }
    }

    /// Checks the shape constraints: polylines need two points, markers a positive size.
    pub fn is_valid(&self) -> bool {
        match self {
            Primitive::Polyline { points, .. } => points.len() >= 2,
            Primitive::Polymarker { points, size, .. } => !points.is_empty() && *size > 0.0,
            Primitive::Circle { size, .. } | Primitive::Square { size, .. } => *size > 0.0,
            Primitive::Text { size, .. } => *size > 0.0,
            Primitive::Mesh { mesh, .. } => mesh.is_valid(),
            Primitive::Scale { length, .. } => *length > 0.0,
        }
    }
}
