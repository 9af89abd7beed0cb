//! Retained scene document: every touchable, trajectory and hit with its
//! drawable payload and attribute table, as versioned JSON.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::att::{find, AttDef, AttDefSet, AttValue};
use crate::colour::Colour;
use crate::events::{hit_att_defs, trajectory_att_defs, DrawStyle, Hit, Trajectory};
use crate::geometry::{touchable_att_defs, VisAttributes};
use crate::scene::{MarkerKind, Primitive, TextLayout, HIT_MARKER_SIZE};
use crate::solids::EdgeKind;
use crate::view::{DrawingStyle, Projection, ViewParameters};
use crate::{Solid, Transform, Vec3};

use super::{SceneSink, SinkError, SolidOrigin};

pub const SCHEMA: &str = "multivis-scene/1";

pub const TYPE_GEOMETRY: &str = "geometry";
pub const TYPE_USER_SOLID: &str = "user-solid";
pub const TYPE_EVENT: &str = "event";
pub const TYPE_TRAJECTORY: &str = "trajectory";
pub const TYPE_HIT: &str = "hit";
pub const TYPE_DECORATION: &str = "decoration";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unsupported schema \"{0}\", expected \"{SCHEMA}\"")]
    Schema(String),
    #[error("malformed scene document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scene document: {0}")]
    Invalid(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewHeader {
    pub viewpoint: [f64; 3],
    pub up: [f64; 3],
    pub light: [f64; 3],
    pub zoom: f64,
    pub style: String,
    pub projection: String,
    pub fov_deg: Option<f64>,
    pub window: [u32; 2],
    pub background: [f64; 4],
    pub auxiliary_edges: bool,
    pub segments_per_circle: usize,
}

impl ViewHeader {
    fn from_view(v: &ViewParameters) -> Self {
        let (projection, fov_deg) = match v.projection {
            Projection::Orthographic => ("orthographic", None),
            Projection::Perspective { fov } => ("perspective", Some(fov.to_degrees())),
        };
        Self {
            viewpoint: v.viewpoint.to_f64(),
            up: v.up.to_f64(),
            light: v.light.to_f64(),
            zoom: v.zoom,
            style: match v.style {
                DrawingStyle::Wireframe => "wireframe".into(),
                DrawingStyle::Surface => "surface".into(),
            },
            projection: projection.into(),
            fov_deg,
            window: [v.window.width, v.window.height],
            background: rgba(v.background),
            auxiliary_edges: v.auxiliary_edges,
            segments_per_circle: v.segments_per_circle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub generator: String,
    pub timestamp: String,
    pub view: ViewHeader,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeDef {
    pub name: String,
    pub parent: Option<String>,
    pub attdefs: Vec<AttDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Style {
    pub draw_line: bool,
    pub draw_points: bool,
    pub point_size: f64,
}

/// Drawable content of one instance, in world millimetres unless `two_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Payload {
    Mesh { vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>, edges: Vec<(usize, usize, bool)> },
    Polyline { points: Vec<[f64; 3]>, two_d: bool },
    Markers { marker: String, size: f64, points: Vec<[f64; 3]>, two_d: bool },
    Text { position: [f64; 3], content: String, size: f64, layout: String, offset: [f64; 2], two_d: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub id: usize,
    #[serde(rename = "type")]
    pub type_name: String,
    pub parent: Option<usize>,
    pub colour: [f64; 4],
    pub visible: bool,
    pub line_width: f64,
    pub style: Option<Style>,
    pub payload: Option<Payload>,
    pub attvalues: Vec<AttValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub schema: String,
    pub header: Header,
    pub types: Vec<TypeDef>,
    pub instances: Vec<Instance>,
}

fn rgba(c: Colour) -> [f64; 4] {
    [c.r, c.g, c.b, c.a]
}

fn marker_name(k: MarkerKind) -> &'static str {
    match k {
        MarkerKind::Dot => "dot",
        MarkerKind::Circle => "circle",
        MarkerKind::Square => "square",
    }
}

fn layout_name(l: TextLayout) -> &'static str {
    match l {
        TextLayout::Left => "left",
        TextLayout::Centre => "centre",
        TextLayout::Right => "right",
    }
}

impl SceneDocument {
    /// Parses and checks a document; the schema tag is verified before anything else.
    pub fn from_json(text: &str) -> Result<Self, ExportError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            other => return Err(ExportError::Schema(other.unwrap_or("").to_string())),
        }
        let doc: SceneDocument = serde_json::from_value(raw)?;
        doc.validate()?;
        Ok(doc)
    }

    /// Canonical serialisation: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String, ExportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDef> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn instances_of<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.iter().filter(move |i| i.type_name == type_name)
    }

    /// Every instance's type exists, its parent exists, and each of its
    /// attribute keys is defined exactly once by its type.
    pub fn validate(&self) -> Result<(), ExportError> {
        let ids: BTreeSet<usize> = self.instances.iter().map(|i| i.id).collect();
        if ids.len() != self.instances.len() {
            return Err(ExportError::Invalid("duplicate instance ids".into()));
        }
        for t in &self.types {
            if let Some(p) = &t.parent {
                if self.type_def(p).is_none() {
                    return Err(ExportError::Invalid(format!("type \"{}\" has unknown parent \"{p}\"", t.name)));
                }
            }
        }
        for i in &self.instances {
            let t = self.type_def(&i.type_name).ok_or_else(|| {
                ExportError::Invalid(format!("instance {} has unknown type \"{}\"", i.id, i.type_name))
            })?;
            if let Some(p) = i.parent {
                if !ids.contains(&p) {
                    return Err(ExportError::Invalid(format!("instance {} has unknown parent {p}", i.id)));
                }
            }
            let set = AttDefSet::new(&t.name, t.attdefs.clone());
            set.validate(&i.attvalues).map_err(|e| ExportError::Invalid(format!("instance {}: {e}", i.id)))?;
        }
        Ok(())
    }
}

/// Sink that accumulates a [`SceneDocument`].
pub struct SceneExporter {
    generator: String,
    timestamp: String,
    view: ViewParameters,
    instances: Vec<Instance>,
    events: HashMap<String, usize>,
    hit_keys: BTreeSet<String>,
    pending: Option<(Transform, VisAttributes, SolidOrigin)>,
    bracket: Option<Option<Transform>>,
    document: Option<SceneDocument>,
}

impl SceneExporter {
    pub fn new(timestamp: impl Into<String>) -> Self {
        Self {
            generator: format!("multivis {}", env!("CARGO_PKG_VERSION")),
            timestamp: timestamp.into(),
            view: ViewParameters::default(),
            instances: Vec::new(),
            events: HashMap::new(),
            hit_keys: BTreeSet::new(),
            pending: None,
            bracket: None,
            document: None,
        }
    }

    /// The finished document, available after `end_session`.
    pub fn document(&self) -> Option<&SceneDocument> {
        self.document.as_ref()
    }

    fn push(
        &mut self,
        type_name: &str,
        parent: Option<usize>,
        vis: &VisAttributes,
        payload: Option<Payload>,
        attvalues: Vec<AttValue>,
    ) -> usize {
        let id = self.instances.len();
        self.instances.push(Instance {
            id,
            type_name: type_name.into(),
            parent,
            colour: rgba(vis.colour),
            visible: vis.visible,
            line_width: vis.line_width,
            style: None,
            payload,
            attvalues,
        });
        id
    }

    fn event_instance(&mut self, attributes: &[AttValue]) -> Option<usize> {
        let id = find(attributes, "EventID")?.to_string();
        if let Some(&i) = self.events.get(&id) {
            return Some(i);
        }
        let i =
            self.push(TYPE_EVENT, None, &VisAttributes::default(), None, vec![AttValue::new("EventID", id.clone())]);
        self.events.insert(id, i);
        Some(i)
    }

    fn primitive_payload(p: &Primitive, t: &Transform, two_d: bool) -> Option<Payload> {
        let pt = |v: &Vec3| if two_d { v.to_f64() } else { t.apply_point(*v).to_f64() };
        Some(match p {
            Primitive::Polyline { points, .. } => Payload::Polyline { points: points.iter().map(pt).collect(), two_d },
            Primitive::Polymarker { points, kind, size, .. } => Payload::Markers {
                marker: marker_name(*kind).into(),
                size: *size,
                points: points.iter().map(pt).collect(),
                two_d,
            },
            Primitive::Circle { position, size, .. } => {
                Payload::Markers { marker: "circle".into(), size: *size, points: vec![pt(position)], two_d }
            }
            Primitive::Square { position, size, .. } => {
                Payload::Markers { marker: "square".into(), size: *size, points: vec![pt(position)], two_d }
            }
            Primitive::Text { position, content, size, layout, offset, .. } => Payload::Text {
                position: pt(position),
                content: content.clone(),
                size: *size,
                layout: layout_name(*layout).into(),
                offset: [offset.0, offset.1],
                two_d,
            },
            Primitive::Mesh { mesh, .. } => {
                let m = if two_d { mesh.clone() } else { mesh.transformed(t) };
                mesh_payload(&m)
            }
            Primitive::Scale { position, length, direction, .. } => {
                Payload::Polyline { points: vec![pt(position), pt(&(*position + *direction * *length))], two_d }
            }
        })
    }
}

fn mesh_payload(m: &crate::Mesh) -> Payload {
    Payload::Mesh {
        vertices: m.vertices.iter().map(|v| v.to_f64()).collect(),
        faces: m.faces.clone(),
        edges: m.edges.iter().map(|e| (e.a, e.b, e.kind == EdgeKind::Auxiliary)).collect(),
    }
}

impl SceneSink for SceneExporter {
    fn begin_session(&mut self, view: &ViewParameters) -> Result<(), SinkError> {
        self.view = view.clone();
        self.instances.clear();
        self.events.clear();
        self.hit_keys.clear();
        self.document = None;
        Ok(())
    }

    fn pre_add_solid(
        &mut self,
        transform: &Transform,
        vis: &VisAttributes,
        origin: &SolidOrigin,
    ) -> Result<(), SinkError> {
        self.pending = Some((*transform, *vis, origin.clone()));
        Ok(())
    }

    fn add_solid(&mut self, solid: &Solid) -> Result<(), SinkError> {
        let (t, vis, origin) =
            self.pending.take().ok_or_else(|| SinkError::Protocol("add_solid without pre_add_solid".into()))?;
        let mesh = solid
            .tessellate(self.view.segments_per_circle)
            .map_err(|e| SinkError::Render(e.to_string()))?
            .transformed(&t);
        let type_name = match origin {
            SolidOrigin::Touchable { .. } => TYPE_GEOMETRY,
            SolidOrigin::User { .. } => TYPE_USER_SOLID,
        };
        self.push(type_name, None, &vis, Some(mesh_payload(&mesh)), origin.attributes().to_vec());
        Ok(())
    }

    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        self.pending = None;
        Ok(())
    }

    fn begin_primitives(&mut self, transform: &Transform) -> Result<(), SinkError> {
        self.bracket = Some(Some(*transform));
        Ok(())
    }

    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.bracket = Some(None);
        Ok(())
    }

    fn add_primitive(&mut self, p: &Primitive) -> Result<(), SinkError> {
        let bracket = self.bracket.ok_or_else(|| SinkError::Protocol("add_primitive outside brackets".into()))?;
        let payload = match bracket {
            Some(t) => Self::primitive_payload(p, &t, false),
            None => Self::primitive_payload(p, &Transform::identity(), true),
        };
        self.push(TYPE_DECORATION, None, p.vis(), payload, Vec::new());
        Ok(())
    }

    fn end_primitives(&mut self) -> Result<(), SinkError> {
        self.bracket = None;
        Ok(())
    }

    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.bracket = None;
        Ok(())
    }

    fn add_trajectory(&mut self, t: &Trajectory, style: &DrawStyle, attributes: &[AttValue]) -> Result<(), SinkError> {
        let parent = self.event_instance(attributes);
        let vis = VisAttributes { colour: style.colour, line_width: style.line_width, ..VisAttributes::default() };
        let payload =
            Payload::Polyline { points: t.positions().into_iter().map(|p| p.to_f64()).collect(), two_d: false };
        let id = self.push(TYPE_TRAJECTORY, parent, &vis, Some(payload), attributes.to_vec());
        self.instances[id].style =
            Some(Style { draw_line: style.draw_line, draw_points: style.draw_points, point_size: style.point_size });
        Ok(())
    }

    fn add_hit(&mut self, h: &Hit, colour: Colour, attributes: &[AttValue]) -> Result<(), SinkError> {
        let parent = self.event_instance(attributes);
        self.hit_keys.extend(h.extra.iter().map(|a| a.key.clone()));
        let payload = Payload::Markers {
            marker: "square".into(),
            size: HIT_MARKER_SIZE,
            points: vec![h.position.to_f64()],
            two_d: false,
        };
        self.push(TYPE_HIT, parent, &VisAttributes::with_colour(colour), Some(payload), attributes.to_vec());
        Ok(())
    }

    fn end_session(&mut self) -> Result<(), SinkError> {
        let ty = |name: &str, parent: Option<&str>, attdefs: Vec<AttDef>| TypeDef {
            name: name.into(),
            parent: parent.map(Into::into),
            attdefs,
        };
        let types = vec![
            ty(TYPE_GEOMETRY, None, touchable_att_defs().defs),
            ty(TYPE_USER_SOLID, None, Vec::new()),
            ty(TYPE_EVENT, None, vec![AttDef::new("EventID", "Event ID", crate::att::AttKind::Int, false)]),
            ty(TYPE_TRAJECTORY, Some(TYPE_EVENT), trajectory_att_defs().defs),
            ty(TYPE_HIT, Some(TYPE_EVENT), hit_att_defs(self.hit_keys.iter().map(String::as_str)).defs),
            ty(TYPE_DECORATION, None, Vec::new()),
        ];
        let doc = SceneDocument {
            schema: SCHEMA.into(),
            header: Header {
                generator: self.generator.clone(),
                timestamp: self.timestamp.clone(),
                view: ViewHeader::from_view(&self.view),
            },
            types,
            instances: std::mem::take(&mut self.instances),
        };
        doc.validate().map_err(|e| SinkError::Render(e.to_string()))?;
        self.document = Some(doc);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{generate_toy_event, FilterChain, ToyConfig, TrajectoryModel};
    use crate::geometry::fixtures;
    use crate::scene::{traverse, Model, Scene, TrajectoryDrawMode, TraversalContext};

    fn b1_document() -> (SceneDocument, usize, usize) {
        let g = fixtures::b1();
        let mut s = Scene::new("s");
        s.add_model(Model::PhysicalVolume { root: None, depth_limit: None }, &g).unwrap();
        s.add_model(Model::Trajectories { draw_mode: TrajectoryDrawMode::Line, point_size: 2.0 }, &g).unwrap();
        s.add_model(Model::Hits, &g).unwrap();
        let cfg = ToyConfig::with_world(g.logical(g.logical_by_name("World").unwrap()).solid.bounding_box());
        let e = generate_toy_event(3, 11, 8, 1.0, &cfg);
        let (v, f, m) = (ViewParameters::default(), FilterChain::default(), TrajectoryModel::by_charge("m"));
        let ctx = TraversalContext {
            geometry: &g,
            view: &v,
            events: vec![&e],
            filters: &f,
            model: &m,
            date: String::new(),
            user_transients: &[],
        };
        let mut x = SceneExporter::new("2000-01-01 00:00:00");
        traverse(&s, &mut x, &ctx).unwrap();
        (x.document().unwrap().clone(), e.trajectories.len(), e.hits.len())
    }

    #[test]
    fn counts_and_attributes() {
        let (doc, n, m) = b1_document();
        assert_eq!(doc.instances_of(TYPE_GEOMETRY).count(), 4);
        assert_eq!(doc.instances_of(TYPE_TRAJECTORY).count(), n);
        assert_eq!(doc.instances_of(TYPE_HIT).count(), m);
        assert_eq!(doc.instances_of(TYPE_EVENT).count(), 1);
        for i in doc.instances_of(TYPE_GEOMETRY) {
            for k in ["Density", "Material", "PVPath"] {
                assert!(find(&i.attvalues, k).is_some());
            }
        }
    }

    #[test]
    fn byte_identical_round_trip() {
        let (doc, ..) = b1_document();
        let a = doc.to_json().unwrap();
        let b = SceneDocument::from_json(&a).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_other_schema() {
        let (doc, ..) = b1_document();
        let text = doc.to_json().unwrap().replace(SCHEMA, "other/2");
        assert!(matches!(SceneDocument::from_json(&text), Err(ExportError::Schema(_))));
    }
}
