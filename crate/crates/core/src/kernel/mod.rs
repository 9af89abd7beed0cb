//! The visualisation manager and the high-level drawing interface.

mod facade;
mod manager;
mod system;

pub use facade::{DrawFacade, UserVisAction};
pub use manager::{
    parse_path, IssueRecord, KernelError, RunConfig, SceneHandler, Verbosity, Viewer, VisDefaults, VisManager,
};
pub use system::{builtin_systems, Capabilities, Factory, GraphicsSystem, RenderSetup};
