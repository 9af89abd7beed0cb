//! Scenes: named, ordered collections of models, and their traversal into the
//! low-level sink protocol.

mod primitive;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::colour::Colour;
use crate::drivers::{SceneSink, SinkError, SolidOrigin};
use crate::events::{hit_attributes, trajectory_attributes, Event, FilterChain, TrajectoryModel};
use crate::geometry::{Geometry, GeometryError, PathElement, VisAttributes};
use crate::kernel::{DrawFacade, UserVisAction};
use crate::math::Axis;
use crate::units::{best_unit, Category};
use crate::view::ViewParameters;
use crate::{Solid, Transform, Vec3};

pub use primitive::{MarkerKind, Primitive, TextLayout};

/// Side of the square hit markers, pixels.
pub const HIT_MARKER_SIZE: f64 = 5.0;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error(transparent)]
    Sink(#[from] SinkError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no volume \"{0}\" in the geometry")]
    UnknownVolume(String),
    #[error("2D coordinates ({0}, {1}) lie outside [-1, 1]")]
    OutOfViewport(f64, f64),
}

/// Bounding sphere; a negative radius is the empty extent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extent {
    pub centre: Vec3,
    pub radius: f64,
}

impl Default for Extent {
    fn default() -> Self {
        Self::EMPTY
    }
}

impl Extent {
    pub const EMPTY: Extent = Extent { centre: Vec3::new(0.0, 0.0, 0.0), radius: -1.0 };

    pub fn new(centre: Vec3, radius: f64) -> Self {
        Self { centre, radius }
    }

    pub fn is_empty(&self) -> bool {
        self.radius < 0.0
    }

    /// Smallest sphere enclosing both.
    pub fn union(&self, o: &Extent) -> Extent {
        if self.is_empty() {
            return *o;
        }
        if o.is_empty() {
            return *self;
        }
        let d = (o.centre - self.centre).norm();
        if d + o.radius <= self.radius {
            return *self;
        }
        if d + self.radius <= o.radius {
            return *o;
        }
        let radius = (d + self.radius + o.radius) / 2.0;
        let centre = self.centre + (o.centre - self.centre) * ((radius - self.radius) / d);
        Extent { centre, radius }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EndOfEventAction {
    #[default]
    Refresh,
    Accumulate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TrajectoryDrawMode {
    #[default]
    Line,
    StepPoints,
    Both,
}

#[derive(Clone)]
pub enum Model {
    /// Rollout of the subtree at `root` (the world when `None`).
    PhysicalVolume {
        root: Option<Vec<PathElement>>,
        depth_limit: Option<usize>,
    },
    Trajectories {
        draw_mode: TrajectoryDrawMode,
        point_size: f64,
    },
    Hits,
    Axes {
        origin: Vec3,
        length: f64,
    },
    Scale {
        position: Vec3,
        length: f64,
        direction: Axis,
        vis: VisAttributes,
    },
    Text2D {
        x: f64,
        y: f64,
        size: f64,
        offset: (f64, f64),
        content: String,
        layout: TextLayout,
        vis: VisAttributes,
    },
    Text3D {
        position: Vec3,
        size: f64,
        offset: (f64, f64),
        content: String,
        layout: TextLayout,
        vis: VisAttributes,
    },
    Frame {
        vis: VisAttributes,
    },
    DateStamp {
        size: f64,
        vis: VisAttributes,
    },
    EventId {
        size: f64,
        vis: VisAttributes,
    },
    Logo2D {
        size: f64,
        vis: VisAttributes,
    },
    User(Arc<dyn UserVisAction>),
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.description())
    }
}

impl Model {
    pub fn is_transient(&self) -> bool {
        matches!(self, Model::Trajectories { .. } | Model::Hits)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::PhysicalVolume { .. } => "PhysicalVolumeModel",
            Model::Trajectories { .. } => "TrajectoriesModel",
            Model::Hits => "HitsModel",
            Model::Axes { .. } => "AxesModel",
            Model::Scale { .. } => "ScaleModel",
            Model::Text2D { .. } => "Text2DModel",
            Model::Text3D { .. } => "TextModel",
            Model::Frame { .. } => "FrameModel",
            Model::DateStamp { .. } => "DateModel",
            Model::EventId { .. } => "EventIDModel",
            Model::Logo2D { .. } => "Logo2DModel",
            Model::User(_) => "UserVisAction",
        }
    }

    /// Short human-readable summary for listings and state digests.
    pub fn description(&self) -> String {
        match self {
            Model::PhysicalVolume { root, depth_limit } => format!(
                "PhysicalVolumeModel {} depth {}",
                root.as_deref().map_or_else(|| "world".to_string(), crate::geometry::path_string),
                depth_limit.map_or("unlimited".to_string(), |d| d.to_string())
            ),
            Model::Trajectories { draw_mode, point_size } => {
                format!("TrajectoriesModel {draw_mode:?} point size {point_size}")
            }
            Model::Axes { origin, length } => format!("AxesModel at {:?} length {length} mm", origin.to_f64()),
            Model::Scale { length, direction, .. } => format!("ScaleModel {length} mm along {direction:?}"),
            Model::Text2D { x, y, content, .. } => format!("Text2DModel \"{content}\" at ({x}, {y})"),
            Model::Text3D { position, content, .. } => format!("TextModel \"{content}\" at {:?}", position.to_f64()),
            Model::User(a) => format!("UserVisAction \"{}\"", a.name()),
            other => other.kind_name().to_string(),
        }
    }

    fn extent(&self, geometry: &Geometry) -> Result<Extent, SceneError> {
        Ok(match self {
            Model::PhysicalVolume { root, .. } => {
                let t = match root {
                    None => geometry.world_touchable()?,
                    Some(p) => geometry
                        .resolve_path(p)
                        .ok_or_else(|| SceneError::UnknownVolume(crate::geometry::path_string(p)))?,
                };
                let b = t.solid.bounding_box().transformed(&t.world_transform);
                Extent::new(b.centre(), b.size().norm() / 2.0)
            }
            Model::Axes { origin, length } => Extent::new(*origin, *length),
            Model::Scale { position, length, .. } => Extent::new(*position, *length),
            Model::Text3D { position, .. } => Extent::new(*position, 0.0),
            Model::User(a) => a.extent().unwrap_or(Extent::EMPTY),
            _ => Extent::EMPTY,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub name: String,
    pub permanent: Vec<Model>,
    pub transient: Vec<Model>,
    pub extent: Extent,
    pub end_of_event_action: EndOfEventAction,
}

impl Scene {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            permanent: Vec::new(),
            transient: Vec::new(),
            extent: Extent::EMPTY,
            end_of_event_action: EndOfEventAction::Refresh,
        }
    }

    /// Adds a model: trajectories and hits to the transient list, everything
    /// else to the permanent list. Only permanent models define the extent.
    pub fn add_model(&mut self, model: Model, geometry: &Geometry) -> Result<(), SceneError> {
        if model.is_transient() {
            self.transient.push(model);
            return Ok(());
        }
        if let Model::Text2D { x, y, .. } = &model {
            if x.abs() > 1.0 || y.abs() > 1.0 {
                return Err(SceneError::OutOfViewport(*x, *y));
            }
        }
        let e = model.extent(geometry)?;
        self.permanent.push(model);
        self.extent = self.extent.union(&e);
        Ok(())
    }

    pub fn has_trajectories_model(&self) -> bool {
        self.transient.iter().any(|m| matches!(m, Model::Trajectories { .. }))
    }

    pub fn is_empty(&self) -> bool {
        self.permanent.is_empty() && self.transient.is_empty()
    }

    /// Recomputes the extent, e.g. after the geometry changed.
    pub fn recompute_extent(&mut self, geometry: &Geometry) -> Result<(), SceneError> {
        let mut e = Extent::EMPTY;
        for m in &self.permanent {
            e = e.union(&m.extent(geometry)?);
        }
        self.extent = e;
        Ok(())
    }

    /// Default axes for this scene: a tenth of the extent radius.
    pub fn default_axes_length(&self) -> f64 {
        if self.extent.is_empty() || self.extent.radius == 0.0 {
            100.0
        } else {
            self.extent.radius / 10.0
        }
    }

    /// Default scale length: a fifth of the extent radius, rounded down to 1, 2 or 5 × 10ⁿ mm.
    pub fn default_scale_length(&self) -> f64 {
        let raw = if self.extent.is_empty() || self.extent.radius == 0.0 { 100.0 } else { self.extent.radius / 5.0 };
        round_125(raw)
    }
}

/// Largest value of the form {1, 2, 5} × 10ⁿ not exceeding `x`.
pub fn round_125(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    let m = x / p;
    let k = if m >= 5.0 - 1e-9 {
        5.0
    } else if m >= 2.0 - 1e-9 {
        2.0
    } else {
        1.0
    };
    k * p
}

/// Everything besides the scene that a traversal reads.
pub struct TraversalContext<'a> {
    pub geometry: &'a Geometry,
    pub view: &'a ViewParameters,
    /// Events whose transients are drawn, oldest first.
    pub events: Vec<&'a Event>,
    pub filters: &'a FilterChain,
    pub model: &'a TrajectoryModel,
    /// Text of the date stamp.
    pub date: String,
    /// Immediate drawings from user code, delivered after the events.
    pub user_transients: &'a [UserTransient],
}

/// Something user code drew directly rather than through a vis action. It is
/// not regenerated by a rebuild.
#[derive(Clone, Debug, PartialEq)]
pub enum UserTransient {
    Primitive { primitive: Primitive, transform: Transform },
    Primitive2D(Primitive),
    Solid { solid: Solid, vis: VisAttributes, transform: Transform },
}

/// Delivers the scene to `sink`: permanent models in order, then each event's
/// transients. The call sequence depends only on the scene and the context.
pub fn traverse(scene: &Scene, sink: &mut dyn SceneSink, ctx: &TraversalContext<'_>) -> Result<(), SceneError> {
    sink.begin_session(ctx.view)?;
    for model in &scene.permanent {
        draw_permanent(model, sink, ctx)?;
    }
    for event in &ctx.events {
        for model in &scene.transient {
            draw_transient(model, event, sink, ctx)?;
        }
    }
    if !ctx.user_transients.is_empty() {
        let mut canvas = SinkCanvas { sink, action: "immediate".into(), error: None };
        for t in ctx.user_transients {
            match t {
                UserTransient::Primitive { primitive, transform } => canvas.draw_primitive(primitive, transform),
                UserTransient::Primitive2D(p) => canvas.draw_primitive_2d(p),
                UserTransient::Solid { solid, vis, transform } => canvas.draw_solid(solid, vis, transform),
            }
        }
        if let Some(e) = canvas.error {
            return Err(e.into());
        }
    }
    sink.end_session()?;
    Ok(())
}

fn primitives(sink: &mut dyn SceneSink, transform: &Transform, ps: &[Primitive]) -> Result<(), SceneError> {
    sink.begin_primitives(transform)?;
    for p in ps {
        sink.add_primitive(p)?;
    }
    sink.end_primitives()?;
    Ok(())
}

fn primitives_2d(sink: &mut dyn SceneSink, ps: &[Primitive]) -> Result<(), SceneError> {
    sink.begin_primitives_2d()?;
    for p in ps {
        sink.add_primitive(p)?;
    }
    sink.end_primitives_2d()?;
    Ok(())
}

fn text_2d(x: f64, y: f64, size: f64, content: String, layout: TextLayout, vis: VisAttributes) -> Primitive {
    Primitive::Text { position: Vec3::new(x, y, 0.0), content, size, layout, offset: (0.0, 0.0), vis }
}

fn draw_permanent(model: &Model, sink: &mut dyn SceneSink, ctx: &TraversalContext<'_>) -> Result<(), SceneError> {
    let id = Transform::identity();
    match model {
        Model::PhysicalVolume { root, depth_limit } => {
            let g = ctx.geometry;
            let root = match root {
                None => g.world_touchable()?,
                Some(p) => {
                    g.resolve_path(p).ok_or_else(|| SceneError::UnknownVolume(crate::geometry::path_string(p)))?
                }
            };
            for t in g.descend_from(&root, *depth_limit, ctx.view.culling_invisible)? {
                let attributes = g.touchable_attributes(&t);
                let transform = t.world_transform;
                let vis = t.vis;
                let solid = Arc::clone(&t.solid);
                let origin = SolidOrigin::Touchable { touchable: t, attributes };
                sink.pre_add_solid(&transform, &vis, &origin)?;
                sink.add_solid(&solid)?;
                sink.post_add_solid()?;
            }
        }
        Model::Axes { origin, length } => {
            let axis = |dir: Vec3, c: Colour| Primitive::Polyline {
                points: vec![*origin, *origin + dir * *length],
                vis: VisAttributes::with_colour(c),
            };
            let ps = [
                axis(Vec3::unit_x(), Colour::RED),
                axis(Vec3::unit_y(), Colour::GREEN),
                axis(Vec3::unit_z(), Colour::BLUE),
            ];
            primitives(sink, &id, &ps)?;
        }
        Model::Scale { position, length, direction, vis } => {
            let p = Primitive::Scale {
                position: *position,
                length: *length,
                direction: direction.unit(),
                annotation: best_unit(*length, Category::Length),
                vis: *vis,
            };
            primitives(sink, &id, &[p])?;
        }
        Model::Text2D { x, y, size, offset, content, layout, vis } => {
            let p = Primitive::Text {
                position: Vec3::new(*x, *y, 0.0),
                content: content.clone(),
                size: *size,
                layout: *layout,
                offset: *offset,
                vis: *vis,
            };
            primitives_2d(sink, &[p])?;
        }
        Model::Text3D { position, size, offset, content, layout, vis } => {
            let p = Primitive::Text {
                position: *position,
                content: content.clone(),
                size: *size,
                layout: *layout,
                offset: *offset,
                vis: *vis,
            };
            primitives(sink, &id, &[p])?;
        }
        Model::Frame { vis } => {
            let c = |x, y| Vec3::new(x, y, 0.0);
            let p = Primitive::Polyline {
                points: vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0)],
                vis: *vis,
            };
            primitives_2d(sink, &[p])?;
        }
        Model::DateStamp { size, vis } => {
            primitives_2d(sink, &[text_2d(0.95, 0.9, *size, ctx.date.clone(), TextLayout::Right, *vis)])?;
        }
        Model::EventId { size, vis } => {
            if let Some(last) = ctx.events.last() {
                let content = if ctx.events.len() > 1 {
                    format!("Event {} ({} events)", last.event_id, ctx.events.len())
                } else {
                    format!("Event {}", last.event_id)
                };
                primitives_2d(sink, &[text_2d(-0.95, -0.95, *size, content, TextLayout::Left, *vis)])?;
            }
        }
        Model::Logo2D { size, vis } => {
            primitives_2d(sink, &[text_2d(-0.95, 0.9, *size, "multivis".into(), TextLayout::Left, *vis)])?;
        }
        Model::User(action) => {
            let mut canvas = SinkCanvas { sink, action: action.name().to_string(), error: None };
            action.draw(&mut canvas);
            if let Some(e) = canvas.error {
                return Err(e.into());
            }
        }
        Model::Trajectories { .. } | Model::Hits => {}
    }
    Ok(())
}

fn draw_transient(
    model: &Model,
    event: &Event,
    sink: &mut dyn SceneSink,
    ctx: &TraversalContext<'_>,
) -> Result<(), SceneError> {
    match model {
        Model::Trajectories { draw_mode, point_size } => {
            for t in event.trajectories.iter().filter(|t| ctx.filters.accept(t)) {
                let mut style = ctx.model.style(t);
                match draw_mode {
                    TrajectoryDrawMode::Line => {}
                    TrajectoryDrawMode::StepPoints => {
                        style.draw_points = true;
                        style.draw_line = false;
                        style.point_size = *point_size;
                    }
                    TrajectoryDrawMode::Both => {
                        style.draw_points = true;
                        style.point_size = style.point_size.max(*point_size);
                    }
                }
                sink.add_trajectory(t, &style, &trajectory_attributes(t, event.event_id))?;
            }
        }
        Model::Hits => {
            let (lo, hi) = event.hits.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), h| {
                (a.min(h.energy_deposit), b.max(h.energy_deposit))
            });
            for h in &event.hits {
                let t = if hi > lo { (h.energy_deposit - lo) / (hi - lo) } else { 1.0 };
                let colour = Colour::WHITE.lerp(&Colour::RED, t);
                sink.add_hit(h, colour, &hit_attributes(h, event.event_id))?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Lets a user vis action draw straight into the sink being traversed.
struct SinkCanvas<'s> {
    sink: &'s mut dyn SceneSink,
    action: String,
    error: Option<SinkError>,
}

impl SinkCanvas<'_> {
    fn run(&mut self, f: impl FnOnce(&mut dyn SceneSink) -> Result<(), SinkError>) {
        if self.error.is_none() {
            if let Err(e) = f(self.sink) {
                self.error = Some(e);
            }
        }
    }
}

impl DrawFacade for SinkCanvas<'_> {
    fn draw_primitive(&mut self, p: &Primitive, transform: &Transform) {
        self.run(|s| {
            s.begin_primitives(transform)?;
            s.add_primitive(p)?;
            s.end_primitives()
        });
    }

    fn draw_primitive_2d(&mut self, p: &Primitive) {
        self.run(|s| {
            s.begin_primitives_2d()?;
            s.add_primitive(p)?;
            s.end_primitives_2d()
        });
    }

    fn draw_solid(&mut self, solid: &Solid, vis: &VisAttributes, transform: &Transform) {
        let origin = SolidOrigin::User { action: self.action.clone() };
        self.run(|s| {
            s.pre_add_solid(transform, vis, &origin)?;
            s.add_solid(solid)?;
            s.post_add_solid()
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::{CountingSink, ProtocolRecorder};
    use crate::geometry::fixtures;

    fn ctx<'a>(
        g: &'a Geometry,
        v: &'a ViewParameters,
        f: &'a FilterChain,
        m: &'a TrajectoryModel,
    ) -> TraversalContext<'a> {
        TraversalContext {
            geometry: g,
            view: v,
            events: vec![],
            filters: f,
            model: m,
            date: "2000-01-01".into(),
            user_transients: &[],
        }
    }

    #[test]
    fn b1_delivers_four_solids() {
        let g = fixtures::b1();
        let mut s = Scene::new("s");
        s.add_model(Model::PhysicalVolume { root: None, depth_limit: None }, &g).unwrap();
        let (v, f, m) = (ViewParameters::default(), FilterChain::default(), TrajectoryModel::by_charge("m"));
        let mut c = CountingSink::default();
        traverse(&s, &mut c, &ctx(&g, &v, &f, &m)).unwrap();
        assert_eq!(c.solids, 4);
        let r = (s.extent.radius - (120f64.powi(2) * 2.0 + 180f64.powi(2)).sqrt()).abs();
        assert!(r < 1e-9);
    }

    #[test]
    fn axes_are_three_coloured_polylines() {
        let g = fixtures::b1();
        let mut s = Scene::new("s");
        s.add_model(Model::Axes { origin: Vec3::zero(), length: 10.0 }, &g).unwrap();
        let (v, f, m) = (ViewParameters::default(), FilterChain::default(), TrajectoryModel::by_charge("m"));
        let mut rec = ProtocolRecorder::default();
        traverse(&s, &mut rec, &ctx(&g, &v, &f, &m)).unwrap();
        let colours: Vec<Colour> = rec
            .primitives()
            .iter()
            .map(|p| match p {
                Primitive::Polyline { vis, .. } => vis.colour,
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        assert_eq!(colours, [Colour::RED, Colour::GREEN, Colour::BLUE]);
    }

    #[test]
    fn empty_scene_only_session_markers() {
        let g = fixtures::b1();
        let s = Scene::new("s");
        let (v, f, m) = (ViewParameters::default(), FilterChain::default(), TrajectoryModel::by_charge("m"));
        let mut rec = ProtocolRecorder::default();
        traverse(&s, &mut rec, &ctx(&g, &v, &f, &m)).unwrap();
        assert_eq!(rec.call_names(), ["begin_session", "end_session"]);
    }

    #[test]
    fn transients_do_not_change_extent_and_order_is_kept() {
        let g = fixtures::b1();
        let mut s = Scene::new("s");
        s.add_model(Model::Axes { origin: Vec3::zero(), length: 5.0 }, &g).unwrap();
        let e = s.extent;
        s.add_model(Model::Trajectories { draw_mode: TrajectoryDrawMode::Line, point_size: 2.0 }, &g).unwrap();
        assert_eq!(s.extent, e);
        s.add_model(Model::Frame { vis: VisAttributes::default() }, &g).unwrap();
        let kinds: Vec<_> = s.permanent.iter().map(|m| m.kind_name()).collect();
        assert_eq!(kinds, ["AxesModel", "FrameModel"]);
        assert_eq!(s.transient.len(), 1);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_125(43.0), 20.0);
        assert_eq!(round_125(57.0), 50.0);
        assert_eq!(round_125(0.13), 0.1);
        assert_eq!(round_125(100.0), 100.0);
    }

    #[test]
    fn extent_union() {
        let a = Extent::new(Vec3::zero(), 1.0);
        let b = Extent::new(Vec3::new(4.0, 0.0, 0.0), 1.0);
        let u = a.union(&b);
        assert!((u.radius - 3.0).abs() < 1e-12 && (u.centre.x - 2.0).abs() < 1e-12);
        assert_eq!(a.union(&Extent::EMPTY), a);
    }
}
