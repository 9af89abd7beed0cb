//! Projected 2D drawing shared by the SVG and EPS writers.

mod eps;
mod svg;

use crate::att::AttValue;
use crate::colour::Colour;
use crate::events::{DrawStyle, Hit, Trajectory};
use crate::geometry::{ForcedStyle, LineStyle, VisAttributes};
use crate::scene::{Extent, MarkerKind, Primitive, TextLayout, HIT_MARKER_SIZE};
use crate::solids::EdgeKind;
use crate::view::{Camera, DrawingStyle, Projection, ViewParameters};
use crate::{Mesh, Solid, Transform, Vec3};

use super::{lambert, SceneSink, SinkError, SolidOrigin};

pub use eps::to_eps;
pub use svg::to_svg;

/// A shape in pixel coordinates, origin top-left, y down.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape2 {
    Line { a: (f64, f64), b: (f64, f64) },
    Polyline { points: Vec<(f64, f64)> },
    Polygon { points: Vec<(f64, f64)> },
    Marker { at: (f64, f64), kind: MarkerKind, size: f64 },
    Text { at: (f64, f64), content: String, size: f64, layout: TextLayout },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    /// Depth sorted in surface style.
    Scene,
    /// Drawn over the scene in insertion order.
    Overlay,
    /// Viewport-fixed 2D output, drawn last.
    Screen,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaintItem {
    pub shape: Shape2,
    pub colour: Colour,
    pub line_width: f64,
    pub line_style: LineStyle,
    /// View depth; larger is nearer the camera.
    pub depth: f64,
    pub layer: Layer,
    /// `geometry`, `decoration`, `trajectory`, `step-point`, `hit` or `user`.
    pub class: &'static str,
}

/// The final, ordered picture that the serialisers write out.
#[derive(Clone, Debug, PartialEq)]
pub struct PaintedScene {
    pub width: u32,
    pub height: u32,
    pub background: Colour,
    pub items: Vec<PaintItem>,
}

impl PaintedScene {
    /// Pixel bounds of everything drawn, or the whole window when empty.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut add = |(x, y): (f64, f64), pad: f64| {
            b = (b.0.min(x - pad), b.1.min(y - pad), b.2.max(x + pad), b.3.max(y + pad));
        };
        for it in &self.items {
            let pad = it.line_width / 2.0;
            match &it.shape {
                Shape2::Line { a, b } => {
                    add(*a, pad);
                    add(*b, pad);
                }
                Shape2::Polyline { points } | Shape2::Polygon { points } => points.iter().for_each(|p| add(*p, pad)),
                Shape2::Marker { at, size, .. } => add(*at, size / 2.0),
                Shape2::Text { at, size, .. } => add(*at, *size),
            }
        }
        if b.0.is_finite() {
            b
        } else {
            (0.0, 0.0, self.width as f64, self.height as f64)
        }
    }

    /// Colour as written: anything matching the background is drawn in its
    /// complement so that the default white-on-white stays visible.
    pub fn ink(&self, c: Colour) -> Colour {
        let bg = self.background;
        if c.to_rgb8() == bg.to_rgb8() {
            Colour::new(1.0 - c.r, 1.0 - c.g, 1.0 - c.b, c.a)
        } else {
            c
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Bracket {
    None,
    World(Transform),
    Screen,
}

/// Sink that projects everything it receives into a [`PaintedScene`].
pub struct VectorPainter {
    extent: Extent,
    view: ViewParameters,
    camera: Option<Camera>,
    items: Vec<PaintItem>,
    pending: Option<(Transform, VisAttributes, &'static str)>,
    bracket: Bracket,
}

impl VectorPainter {
    /// `extent` is the region framed by the view, normally the scene extent.
    pub fn new(extent: Extent) -> Self {
        Self {
            extent,
            view: ViewParameters::default(),
            camera: None,
            items: Vec::new(),
            pending: None,
            bracket: Bracket::None,
        }
    }

    fn camera(&self) -> Result<&Camera, SinkError> {
        self.camera.as_ref().ok_or_else(|| SinkError::Protocol("drawing outside a session".into()))
    }

    fn to_px(&self, p: Vec3) -> Result<((f64, f64), f64), SinkError> {
        let cam = self.camera()?;
        let (x, y, depth) = cam.project(p);
        Ok((cam.to_pixels(x, y, self.view.window.width, self.view.window.height), depth))
    }

    fn screen_px(&self, p: Vec3) -> (f64, f64) {
        let (w, h) = (self.view.window.width as f64, self.view.window.height as f64);
        let s = w.min(h) / 2.0;
        (w / 2.0 + p.x * s, h / 2.0 - p.y * s)
    }

    fn push(&mut self, shape: Shape2, vis: &VisAttributes, depth: f64, layer: Layer, class: &'static str) {
        self.items.push(PaintItem {
            shape,
            colour: vis.colour,
            line_width: vis.line_width,
            line_style: vis.line_style,
            depth,
            layer,
            class,
        });
    }

    fn marker_layer(&self) -> Layer {
        if self.view.hidden_marker {
            Layer::Scene
        } else {
            Layer::Overlay
        }
    }

    fn paint_mesh(&mut self, mesh: &Mesh, vis: &VisAttributes, class: &'static str) -> Result<(), SinkError> {
        let style = match vis.forced_style {
            ForcedStyle::Wireframe => DrawingStyle::Wireframe,
            ForcedStyle::Surface => DrawingStyle::Surface,
            ForcedStyle::None => self.view.style,
        };
        match style {
            DrawingStyle::Wireframe => {
                for e in &mesh.edges {
                    if e.kind == EdgeKind::Auxiliary && !self.view.auxiliary_edges {
                        continue;
                    }
                    let (a, da) = self.to_px(mesh.vertices[e.a])?;
                    let (b, db) = self.to_px(mesh.vertices[e.b])?;
                    self.push(Shape2::Line { a, b }, vis, (da + db) / 2.0, Layer::Scene, class);
                }
            }
            DrawingStyle::Surface => {
                let cam = *self.camera()?;
                let eye = cam.target + cam.towards * cam.distance;
                for f in 0..mesh.faces.len() {
                    let n = mesh.face_normal(f);
                    let c = mesh.face_centroid(f);
                    let facing = match cam.projection {
                        Projection::Orthographic => n.dot(cam.towards),
                        Projection::Perspective { .. } => n.dot(eye - c),
                    };
                    if facing <= 0.0 && vis.colour.is_opaque() {
                        continue;
                    }
                    let points = mesh.faces[f]
                        .iter()
                        .map(|&i| self.to_px(mesh.vertices[i]).map(|p| p.0))
                        .collect::<Result<_, _>>()?;
                    let (_, depth) = self.to_px(c)?;
                    let shaded = VisAttributes { colour: vis.colour.shaded(lambert(n, self.view.light)), ..*vis };
                    self.push(Shape2::Polygon { points }, &shaded, depth, Layer::Scene, class);
                }
            }
        }
        Ok(())
    }

    fn paint_primitive(&mut self, p: &Primitive, transform: &Transform) -> Result<(), SinkError> {
        let class = "decoration";
        let ml = self.marker_layer();
        match p {
            Primitive::Polyline { points, vis } => {
                let mut px = Vec::with_capacity(points.len());
                let mut depth = f64::NEG_INFINITY;
                for q in points {
                    let (xy, d) = self.to_px(transform.apply_point(*q))?;
                    px.push(xy);
                    depth = depth.max(d);
                }
                self.push(Shape2::Polyline { points: px }, vis, depth, Layer::Scene, class);
            }
            Primitive::Polymarker { points, kind, size, vis } => {
                for q in points {
                    let (at, d) = self.to_px(transform.apply_point(*q))?;
                    self.push(Shape2::Marker { at, kind: *kind, size: *size }, vis, d, ml, class);
                }
            }
            Primitive::Circle { position, size, vis } | Primitive::Square { position, size, vis } => {
                let kind = if matches!(p, Primitive::Circle { .. }) { MarkerKind::Circle } else { MarkerKind::Square };
                let (at, d) = self.to_px(transform.apply_point(*position))?;
                self.push(Shape2::Marker { at, kind, size: *size }, vis, d, ml, class);
            }
            Primitive::Text { position, content, size, layout, offset, vis } => {
                let (at, d) = self.to_px(transform.apply_point(*position))?;
                let at = (at.0 + offset.0, at.1 - offset.1);
                let shape = Shape2::Text { at, content: content.clone(), size: *size, layout: *layout };
                self.push(shape, vis, d, Layer::Overlay, class);
            }
            Primitive::Mesh { mesh, vis } => self.paint_mesh(&mesh.transformed(transform), vis, class)?,
            Primitive::Scale { position, length, direction, annotation, vis } => {
                let a3 = transform.apply_point(*position);
                let b3 = transform.apply_point(*position + *direction * *length);
                let (a, da) = self.to_px(a3)?;
                let (b, db) = self.to_px(b3)?;
                self.push(Shape2::Line { a, b }, vis, da.max(db), Layer::Overlay, class);
                let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0 - 4.0);
                let text =
                    Shape2::Text { at: mid, content: annotation.clone(), size: 12.0, layout: TextLayout::Centre };
                self.push(text, vis, da.max(db), Layer::Overlay, class);
            }
        }
        Ok(())
    }

    fn paint_primitive_2d(&mut self, p: &Primitive) {
        let class = "decoration";
        let layer = Layer::Screen;
        match p {
            Primitive::Polyline { points, vis } => {
                let points = points.iter().map(|q| self.screen_px(*q)).collect();
                self.push(Shape2::Polyline { points }, vis, 0.0, layer, class);
            }
            Primitive::Polymarker { points, kind, size, vis } => {
                for q in points {
                    let at = self.screen_px(*q);
                    self.push(Shape2::Marker { at, kind: *kind, size: *size }, vis, 0.0, layer, class);
                }
            }
            Primitive::Circle { position, size, vis } | Primitive::Square { position, size, vis } => {
                let kind = if matches!(p, Primitive::Circle { .. }) { MarkerKind::Circle } else { MarkerKind::Square };
                let at = self.screen_px(*position);
                self.push(Shape2::Marker { at, kind, size: *size }, vis, 0.0, layer, class);
            }
            Primitive::Text { position, content, size, layout, offset, vis } => {
                let at = self.screen_px(*position);
                let at = (at.0 + offset.0, at.1 - offset.1);
                self.push(
                    Shape2::Text { at, content: content.clone(), size: *size, layout: *layout },
                    vis,
                    0.0,
                    layer,
                    class,
                );
            }
            Primitive::Mesh { mesh, vis } => {
                for f in &mesh.faces {
                    let points = f.iter().map(|&i| self.screen_px(mesh.vertices[i])).collect();
                    self.push(Shape2::Polygon { points }, vis, 0.0, layer, class);
                }
            }
            Primitive::Scale { position, length, direction, annotation, vis } => {
                let a = self.screen_px(*position);
                let b = self.screen_px(*position + *direction * *length);
                self.push(Shape2::Line { a, b }, vis, 0.0, layer, class);
                let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0 - 4.0);
                let text =
                    Shape2::Text { at: mid, content: annotation.clone(), size: 12.0, layout: TextLayout::Centre };
                self.push(text, vis, 0.0, layer, class);
            }
        }
    }

    /// Items in drawing order: depth-sorted scene (surface style only, far
    /// first, ties in insertion order), then overlays, then 2D.
    pub fn painted(&self) -> PaintedScene {
        let mut items = self.items.clone();
        if self.view.style == DrawingStyle::Surface {
            items.sort_by(|a, b| {
                a.layer.cmp(&b.layer).then_with(|| {
                    if a.layer == Layer::Scene {
                        a.depth.total_cmp(&b.depth)
                    } else {
                        std::cmp::Ordering::Equal
                    }
                })
            });
        } else {
            items.sort_by_key(|i| i.layer);
        }
        PaintedScene {
            width: self.view.window.width,
            height: self.view.window.height,
            background: self.view.background,
            items,
        }
    }

    pub fn svg(&self) -> String {
        to_svg(&self.painted())
    }

    pub fn eps(&self) -> String {
        to_eps(&self.painted())
    }
}

impl SceneSink for VectorPainter {
    fn begin_session(&mut self, view: &ViewParameters) -> Result<(), SinkError> {
        self.view = view.clone();
        let (centre, radius) =
            if self.extent.is_empty() { (Vec3::zero(), 1.0) } else { (self.extent.centre, self.extent.radius) };
        self.camera = Some(Camera::new(view, centre, radius));
        self.items.clear();
        Ok(())
    }

    fn pre_add_solid(
        &mut self,
        transform: &Transform,
        vis: &VisAttributes,
        origin: &SolidOrigin,
    ) -> Result<(), SinkError> {
        let class = match origin {
            SolidOrigin::Touchable { .. } => "geometry",
            SolidOrigin::User { .. } => "user",
        };
        self.pending = Some((*transform, *vis, class));
        Ok(())
    }

    fn add_solid(&mut self, solid: &Solid) -> Result<(), SinkError> {
        let (transform, vis, class) =
            self.pending.ok_or_else(|| SinkError::Protocol("add_solid without pre_add_solid".into()))?;
        let mesh = solid
            .tessellate(self.view.segments_per_circle)
            .map_err(|e| SinkError::Render(e.to_string()))?
            .transformed(&transform);
        self.paint_mesh(&mesh, &vis, class)
    }

    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        self.pending = None;
        Ok(())
    }

    fn begin_primitives(&mut self, transform: &Transform) -> Result<(), SinkError> {
        self.bracket = Bracket::World(*transform);
        Ok(())
    }

    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.bracket = Bracket::Screen;
        Ok(())
    }

    fn add_primitive(&mut self, p: &Primitive) -> Result<(), SinkError> {
        match self.bracket {
            Bracket::World(t) => self.paint_primitive(p, &t),
            Bracket::Screen => {
                self.paint_primitive_2d(p);
                Ok(())
            }
            Bracket::None => Err(SinkError::Protocol("add_primitive outside brackets".into())),
        }
    }

    fn end_primitives(&mut self) -> Result<(), SinkError> {
        self.bracket = Bracket::None;
        Ok(())
    }

    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.bracket = Bracket::None;
        Ok(())
    }

    fn add_trajectory(&mut self, t: &Trajectory, style: &DrawStyle, _: &[AttValue]) -> Result<(), SinkError> {
        let vis = VisAttributes { colour: style.colour, line_width: style.line_width, ..VisAttributes::default() };
        let projected = t.positions().into_iter().map(|p| self.to_px(p)).collect::<Result<Vec<_>, _>>()?;
        if style.draw_line {
            let depth = projected.iter().fold(f64::NEG_INFINITY, |d, p| d.max(p.1));
            let points = projected.iter().map(|p| p.0).collect();
            self.push(Shape2::Polyline { points }, &vis, depth, Layer::Overlay, "trajectory");
        }
        if style.draw_points {
            let layer = self.marker_layer();
            for (at, d) in projected {
                let shape = Shape2::Marker { at, kind: MarkerKind::Circle, size: style.point_size };
                self.push(shape, &vis, d, layer, "step-point");
            }
        }
        Ok(())
    }

    fn add_hit(&mut self, h: &Hit, colour: Colour, _: &[AttValue]) -> Result<(), SinkError> {
        let (at, d) = self.to_px(h.position)?;
        let layer = self.marker_layer();
        let shape = Shape2::Marker { at, kind: MarkerKind::Square, size: HIT_MARKER_SIZE };
        self.push(shape, &VisAttributes::with_colour(colour), d, layer, "hit");
        Ok(())
    }

    fn end_session(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
}

/// Fixed-point coordinate text with no negative zero.
pub(crate) fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{FilterChain, TrajectoryModel};
    use crate::geometry::fixtures;
    use crate::scene::{traverse, Model, Scene, TraversalContext};

    fn paint(geometry: &crate::geometry::Geometry, view: &ViewParameters) -> VectorPainter {
        let mut s = Scene::new("s");
        s.add_model(Model::PhysicalVolume { root: None, depth_limit: None }, geometry).unwrap();
        let (f, m) = (FilterChain::default(), TrajectoryModel::by_charge("m"));
        let ctx = TraversalContext {
            geometry,
            view,
            events: vec![],
            filters: &f,
            model: &m,
            date: String::new(),
            user_transients: &[],
        };
        let mut p = VectorPainter::new(s.extent);
        traverse(&s, &mut p, &ctx).unwrap();
        p
    }

    #[test]
    fn box_wireframe_has_twelve_lines() {
        let g = fixtures::single_box(Vec3::new(1.0, 1.0, 1.0));
        let svg = paint(&g, &ViewParameters::default()).svg();
        assert_eq!(svg.matches("<line ").count(), 12);
        let eps = paint(&g, &ViewParameters::default()).eps();
        assert_eq!(eps.matches(" L\n").count(), 12);
    }

    #[test]
    fn light_side_is_brighter() {
        let mut v = ViewParameters { style: DrawingStyle::Surface, ..ViewParameters::default() };
        v.set_light(Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        let mut p = VectorPainter::new(Extent::new(Vec3::zero(), 2.0));
        p.begin_session(&v).unwrap();
        let mesh = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap().tessellate(24).unwrap();
        let vis = VisAttributes::with_colour(Colour::new(1.0, 1.0, 1.0, 0.5));
        p.paint_mesh(&mesh, &vis, "geometry").unwrap();
        assert_eq!(p.items.len(), 6);
        let shade_of = |nx: f64| {
            let f = (0..6).find(|&f| (mesh.face_normal(f).x - nx).abs() < 1e-9).unwrap();
            p.items[f].colour.r
        };
        assert!(shade_of(-1.0) > shade_of(1.0));
    }

    #[test]
    fn surface_faces_sorted_far_first() {
        let g = fixtures::b1();
        let v = ViewParameters { style: DrawingStyle::Surface, ..ViewParameters::default() };
        let painted = paint(&g, &v).painted();
        let depths: Vec<f64> = painted.items.iter().filter(|i| i.layer == Layer::Scene).map(|i| i.depth).collect();
        assert!(depths.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn number_format() {
        assert_eq!(num(-0.0001), "0");
        assert_eq!(num(12.5), "12.5");
        assert_eq!(num(3.0), "3");
    }
}
