//! The low-level sink interface and the concrete drivers behind it.

mod atree;
mod export;
mod raytrace;
mod sink;
pub mod vector;

pub use atree::{ascii_tree_render, AsciiTree, PRINT_ALL_VERBOSITY};
pub use export::{
    ExportError, Header, Instance, Payload, SceneDocument, SceneExporter, Style, TypeDef, ViewHeader, SCHEMA,
    TYPE_DECORATION, TYPE_EVENT, TYPE_GEOMETRY, TYPE_HIT, TYPE_TRAJECTORY, TYPE_USER_SOLID,
};
pub use raytrace::{Image, RayTracer};
pub use sink::{Call, CountingSink, ProtocolRecorder, SceneSink, SinkError, SolidOrigin, Tee};
pub use vector::{PaintedScene, VectorPainter};

use crate::Vec3;

/// Shade applied to surfaces facing away from the light.
pub const AMBIENT: f64 = 0.2;

/// Lambert factor for a surface with unit `normal` lit from the unit
/// direction `light` (pointing towards the light), floored at [`AMBIENT`].
pub fn lambert(normal: Vec3, light: Vec3) -> f64 {
    normal.dot(light).max(AMBIENT)
}

/// One output file body produced by a driver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    /// File extension without the dot, e.g. `svg` or `scene.json`.
    pub extension: &'static str,
    pub bytes: Vec<u8>,
}

/// A sink that turns a completed traversal into output files.
pub trait Renderer: SceneSink {
    fn finish(&mut self) -> Result<Vec<Rendered>, SinkError>;
}

impl Renderer for AsciiTree<'_> {
    fn finish(&mut self) -> Result<Vec<Rendered>, SinkError> {
        Ok(vec![Rendered { extension: "txt", bytes: self.text().as_bytes().to_vec() }])
    }
}

impl Renderer for VectorPainter {
    fn finish(&mut self) -> Result<Vec<Rendered>, SinkError> {
        Ok(vec![Rendered { extension: "svg", bytes: self.svg().into_bytes() }])
    }
}

impl Renderer for RayTracer {
    fn finish(&mut self) -> Result<Vec<Rendered>, SinkError> {
        let img = self.image().ok_or_else(|| SinkError::Protocol("no completed session".into()))?;
        Ok(vec![
            Rendered { extension: "ppm", bytes: img.to_ppm() },
            Rendered { extension: "png", bytes: img.to_png()? },
        ])
    }
}

impl Renderer for SceneExporter {
    fn finish(&mut self) -> Result<Vec<Rendered>, SinkError> {
        let doc = self.document().ok_or_else(|| SinkError::Protocol("no completed session".into()))?;
        let text = doc.to_json().map_err(|e| SinkError::Render(e.to_string()))?;
        Ok(vec![Rendered { extension: "scene.json", bytes: text.into_bytes() }])
    }
}
