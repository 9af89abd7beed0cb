use std::fmt;
use std::sync::Arc;

use crate::drivers::{AsciiTree, RayTracer, Renderer, SceneExporter, VectorPainter};
use crate::geometry::Geometry;
use crate::scene::Extent;
use crate::view::{DrawingStyle, ViewParameters};

/// What a graphics system can do.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Capabilities {
    /// Keeps a renderable copy of the scene (stored mode).
    pub retained_store: bool,
    pub renders_2d: bool,
    pub picking_attvalues: bool,
    pub geometry_only: bool,
}

/// Inputs available to a driver when it is created for one rendering.
pub struct RenderSetup<'a> {
    pub geometry: &'a Geometry,
    pub extent: Extent,
    pub timestamp: &'a str,
    pub atree_verbosity: i32,
    /// Worker threads for parallel drivers; `None` for the global pool.
    pub threads: Option<usize>,
}

pub type Factory = Arc<dyn for<'a> Fn(&RenderSetup<'a>) -> Box<dyn Renderer + 'a> + Send + Sync>;

/// A registered driver kind. Each rendering gets a fresh driver instance.
#[derive(Clone)]
pub struct GraphicsSystem {
    pub nickname: String,
    pub description: String,
    pub capabilities: Capabilities,
    pub factory: Factory,
    /// View a new viewer of this system starts from; the window is set on open.
    pub default_view: ViewParameters,
}

impl fmt::Debug for GraphicsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphicsSystem")
            .field("nickname", &self.nickname)
            .field("capabilities", &self.capabilities)
            .finish()
    }
}

impl GraphicsSystem {
    pub fn new(nickname: &str, description: &str, capabilities: Capabilities, factory: Factory) -> Self {
        Self {
            nickname: nickname.into(),
            description: description.into(),
            capabilities,
            factory,
            default_view: ViewParameters::default(),
        }
    }

    pub fn with_view(mut self, view: ViewParameters) -> Self {
        self.default_view = view;
        self
    }
}

/// The four drivers built into the kernel.
pub fn builtin_systems() -> Vec<GraphicsSystem> {
    let none = Capabilities::default();
    vec![
        GraphicsSystem::new(
            "ATree",
            "ASCII tree of the geometry with volumes and masses",
            Capabilities { geometry_only: true, ..none },
            Arc::new(|s: &RenderSetup<'_>| {
                Box::new(AsciiTree::new(s.geometry, s.atree_verbosity)) as Box<dyn Renderer + '_>
            }),
        )
        .with_view(ViewParameters { culling_invisible: false, ..ViewParameters::default() }),
        GraphicsSystem::new(
            "SVG",
            "Vector drawing written as SVG (EPS through /vis/export)",
            Capabilities { renders_2d: true, ..none },
            Arc::new(|s: &RenderSetup<'_>| Box::new(VectorPainter::new(s.extent)) as Box<dyn Renderer + '_>),
        ),
        GraphicsSystem::new(
            "RayTracer",
            "Ray-traced image of the geometry written as PPM and PNG",
            Capabilities { geometry_only: true, ..none },
            Arc::new(|s: &RenderSetup<'_>| Box::new(RayTracer::new(s.extent, s.threads)) as Box<dyn Renderer + '_>),
        )
        .with_view(ViewParameters { style: DrawingStyle::Surface, ..ViewParameters::default() }),
        GraphicsSystem::new(
            "SceneExport",
            "Structured scene document with full attributes",
            Capabilities { retained_store: true, renders_2d: true, picking_attvalues: true, ..none },
            Arc::new(|s: &RenderSetup<'_>| Box::new(SceneExporter::new(s.timestamp)) as Box<dyn Renderer + '_>),
        ),
    ]
}
