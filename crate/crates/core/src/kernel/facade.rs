use crate::geometry::VisAttributes;
use crate::scene::{Extent, Primitive};
use crate::{Solid, Transform};

/// High-level drawing entry points used by user code.
pub trait DrawFacade {
    /// Draws a primitive positioned by `transform` in world coordinates.
    fn draw_primitive(&mut self, p: &Primitive, transform: &Transform);
    /// Draws a primitive in viewport coordinates, `[-1, 1]` on both axes.
    fn draw_primitive_2d(&mut self, p: &Primitive);
    fn draw_solid(&mut self, solid: &Solid, vis: &VisAttributes, transform: &Transform);
}

/// User drawing code that the kernel re-invokes on every rebuild, giving its
/// output the same permanence as the geometry.
pub trait UserVisAction: Send + Sync {
    fn name(&self) -> &str;

    /// Region the action draws into, used to frame the scene.
    fn extent(&self) -> Option<Extent> {
        None
    }

    /// Must not depend on or modify kernel state.
    fn draw(&self, canvas: &mut dyn DrawFacade);
}
