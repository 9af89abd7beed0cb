use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::colour::Colour;
use crate::drivers::{CountingSink, ProtocolRecorder, Rendered, SinkError, Tee, VectorPainter};
use crate::events::{
    generate_toy_event, Event, EventStore, EventsError, FilterChain, ToyConfig, TrajectoryFilter, TrajectoryModel,
};
use crate::geometry::{Geometry, GeometryError, PathElement, VisAttributes};
use crate::scene::{
    traverse, EndOfEventAction, Model, Primitive, Scene, SceneError, TextLayout, TraversalContext, UserTransient,
};
use crate::view::{ViewError, ViewParameters, WindowGeometry};
use crate::{Solid, Transform};

use super::system::{builtin_systems, GraphicsSystem, RenderSetup};
use super::{DrawFacade, UserVisAction};

/// Gate for kernel messages, from silent to chatty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verbosity {
    Quiet,
    Startup,
    Errors,
    #[default]
    Warnings,
    Confirmations,
    Parameters,
    All,
}

impl Verbosity {
    pub const NAMES: [&'static str; 7] =
        ["quiet", "startup", "errors", "warnings", "confirmations", "parameters", "all"];

    const ALL: [Verbosity; 7] = [
        Verbosity::Quiet,
        Verbosity::Startup,
        Verbosity::Errors,
        Verbosity::Warnings,
        Verbosity::Confirmations,
        Verbosity::Parameters,
        Verbosity::All,
    ];
}

impl fmt::Display for Verbosity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Self::NAMES[*self as usize])
    }
}

impl FromStr for Verbosity {
    type Err = String;

    /// Accepts a name (case-insensitive) or an integer; integers above the
    /// highest level saturate.
    fn from_str(s: &str) -> Result<Self, String> {
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Self::ALL[n.clamp(0, 6) as usize]);
        }
        let lower = s.to_ascii_lowercase();
        Self::NAMES
            .iter()
            .position(|n| *n == lower)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| format!("unknown verbosity \"{s}\"; expected one of {} or 0-6", Self::NAMES.join(", ")))
    }
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("graphics system \"{0}\" is already registered")]
    DuplicateSystem(String),
    #[error("unknown graphics system \"{name}\"; registered systems: {known}")]
    UnknownSystem { name: String, known: String },
    #[error("scene \"{0}\" already exists")]
    DuplicateScene(String),
    #[error("no scene \"{0}\"")]
    UnknownScene(String),
    #[error("no viewer \"{0}\"")]
    UnknownViewer(String),
    #[error("no scene handler \"{0}\"")]
    UnknownHandler(String),
    #[error("no current viewer")]
    NoCurrentViewer,
    #[error("no current scene")]
    NoScene,
    #[error("user vis action \"{0}\" is already registered")]
    DuplicateAction(String),
    #[error("no user vis action \"{0}\"")]
    UnknownAction(String),
    #[error("no trajectory model \"{0}\"")]
    UnknownModel(String),
    #[error("unknown trajectory model kind \"{0}\"; expected drawByCharge or drawByParticleID")]
    UnknownModelKind(String),
    #[error("no trajectory filter \"{0}\"")]
    UnknownFilter(String),
    #[error("unknown filter kind \"{0}\"; expected particleFilter, chargeFilter or attributeFilter")]
    UnknownFilterKind(String),
    #[error("no volume \"{0}\" in the geometry")]
    UnknownVolume(String),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sink(#[from] SinkError),
    #[error(transparent)]
    Events(#[from] EventsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Pairs a scene with the graphics system that renders it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneHandler {
    pub name: String,
    pub system: String,
    pub scene: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Viewer {
    /// `viewer-N (SYSTEM)`.
    pub name: String,
    /// `viewer-N`, used for output file names.
    pub short_name: String,
    pub handler: usize,
    pub view: ViewParameters,
    pub auto_refresh: bool,
    /// Number of renderings issued so far.
    pub sequence: u32,
    pub user_transients: Vec<UserTransient>,
    /// Set when state changed while auto refresh was off.
    pub needs_refresh: bool,
}

/// Defaults applied to decorations created by commands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisDefaults {
    pub colour: Colour,
    pub line_width: f64,
    pub text_colour: Colour,
    pub text_layout: TextLayout,
}

impl Default for VisDefaults {
    fn default() -> Self {
        Self { colour: Colour::WHITE, line_width: 1.0, text_colour: Colour::BLUE, text_layout: TextLayout::Left }
    }
}

impl VisDefaults {
    pub fn vis(&self) -> VisAttributes {
        VisAttributes { colour: self.colour, line_width: self.line_width, ..VisAttributes::default() }
    }

    pub fn text_vis(&self) -> VisAttributes {
        VisAttributes { colour: self.text_colour, line_width: self.line_width, ..VisAttributes::default() }
    }
}

/// Parameters of the simulated runs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tracks_per_event: usize,
    pub field_tesla: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 12345, tracks_per_event: 20, field_tesla: 1.0 }
    }
}

/// What one rendering delivered and produced.
#[derive(Clone, Debug)]
pub struct IssueRecord {
    pub viewer: String,
    pub system: String,
    pub sequence: u32,
    pub calls: ProtocolRecorder,
    pub counts: CountingSink,
    pub outputs: Vec<Rendered>,
    pub files: Vec<PathBuf>,
}

impl IssueRecord {
    pub fn output(&self, extension: &str) -> Option<&[u8]> {
        self.outputs.iter().find(|r| r.extension == extension).map(|r| r.bytes.as_slice())
    }
}

/// The visualisation manager: registries of graphics systems, scenes, scene
/// handlers and viewers, plus the event store and drawing-time styling.
pub struct VisManager {
    geometry: Geometry,
    systems: Vec<GraphicsSystem>,
    scenes: Vec<Scene>,
    current_scene: Option<usize>,
    handlers: Vec<SceneHandler>,
    viewers: Vec<Viewer>,
    current_viewer: Option<usize>,
    scene_counter: usize,
    store: EventStore,
    pending_events: VecDeque<Event>,
    filters: FilterChain,
    models: Vec<TrajectoryModel>,
    current_model: Option<usize>,
    model_counter: usize,
    filter_counter: usize,
    default_model: TrajectoryModel,
    actions: BTreeMap<String, Arc<dyn UserVisAction>>,
    pub defaults: VisDefaults,
    verbosity: Verbosity,
    pub atree_verbosity: i32,
    pub out_dir: Option<PathBuf>,
    pub date_override: Option<String>,
    /// Worker threads for parallel drivers; `None` for the global pool.
    pub threads: Option<usize>,
    pub run: RunConfig,
    run_number: Option<u32>,
    run_active: bool,
    messages: Vec<(Verbosity, String)>,
    output: String,
    records: BTreeMap<String, IssueRecord>,
}

impl fmt::Debug for VisManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.state_text())
    }
}

impl Default for VisManager {
    fn default() -> Self {
        Self::new(Geometry::new())
    }
}

impl VisManager {
    /// A manager over `geometry` with the built-in graphics systems registered.
    pub fn new(geometry: Geometry) -> Self {
        let mut m = Self {
            geometry,
            systems: Vec::new(),
            scenes: Vec::new(),
            current_scene: None,
            handlers: Vec::new(),
            viewers: Vec::new(),
            current_viewer: None,
            scene_counter: 0,
            store: EventStore::default(),
            pending_events: VecDeque::new(),
            filters: FilterChain::default(),
            models: Vec::new(),
            current_model: None,
            model_counter: 0,
            filter_counter: 0,
            default_model: TrajectoryModel::by_charge("default"),
            actions: BTreeMap::new(),
            defaults: VisDefaults::default(),
            verbosity: Verbosity::default(),
            atree_verbosity: 1,
            out_dir: None,
            date_override: None,
            threads: None,
            run: RunConfig::default(),
            run_number: None,
            run_active: false,
            messages: Vec::new(),
            output: String::new(),
            records: BTreeMap::new(),
        };
        for s in builtin_systems() {
            m.systems.push(s);
        }
        m
    }

    // ---- messages -------------------------------------------------------

    pub fn verbosity(&self) -> Verbosity {
        self.verbosity
    }

    pub fn set_verbosity(&mut self, v: Verbosity) {
        self.verbosity = v;
    }

    /// Records `msg` if `level` passes the verbosity gate.
    pub fn note(&mut self, level: Verbosity, msg: impl Into<String>) {
        let msg = msg.into();
        log::debug!("{msg}");
        if level <= self.verbosity {
            self.messages.push((level, msg));
        }
    }

    pub fn take_messages(&mut self) -> Vec<(Verbosity, String)> {
        std::mem::take(&mut self.messages)
    }

    /// Text printed by drivers that write to the terminal.
    pub fn take_output(&mut self) -> String {
        std::mem::take(&mut self.output)
    }

    // ---- graphics systems -----------------------------------------------

    pub fn register_system(&mut self, system: GraphicsSystem) -> Result<(), KernelError> {
        if self.systems.iter().any(|s| s.nickname == system.nickname) {
            return Err(KernelError::DuplicateSystem(system.nickname));
        }
        self.systems.push(system);
        Ok(())
    }

    pub fn systems(&self) -> &[GraphicsSystem] {
        &self.systems
    }

    fn system(&self, nickname: &str) -> Result<&GraphicsSystem, KernelError> {
        self.systems.iter().find(|s| s.nickname.eq_ignore_ascii_case(nickname)).ok_or_else(|| {
            KernelError::UnknownSystem {
                name: nickname.to_string(),
                known: self.systems.iter().map(|s| s.nickname.as_str()).collect::<Vec<_>>().join(", "),
            }
        })
    }

    // ---- geometry -------------------------------------------------------

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Applies `f` to the geometry, then reframes every scene and refreshes
    /// every viewer.
    pub fn edit_geometry<R>(&mut self, f: impl FnOnce(&mut Geometry) -> R) -> Result<R, KernelError> {
        let r = f(&mut self.geometry);
        for s in &mut self.scenes {
            s.recompute_extent(&self.geometry)?;
        }
        self.touch_viewers(|_| true)?;
        Ok(r)
    }

    pub fn set_geometry(&mut self, geometry: Geometry) -> Result<(), KernelError> {
        self.edit_geometry(|g| *g = geometry)
    }

    /// Model of the subtree under the first placement named `volume` with copy
    /// number `copy` (any copy when `None`); the world when `volume` is `None`.
    pub fn volume_model(
        &self,
        volume: Option<&str>,
        copy: Option<i32>,
        depth: Option<usize>,
    ) -> Result<Model, KernelError> {
        let root = match volume {
            None => None,
            Some(name) => {
                let world = self.geometry.world_touchable()?;
                if world.name() == name && copy.is_none_or(|c| c == world.copy_no()) {
                    None
                } else {
                    let t = self
                        .geometry
                        .find_touchable(name, copy)?
                        .ok_or_else(|| KernelError::UnknownVolume(name.to_string()))?;
                    Some(t.path)
                }
            }
        };
        Ok(Model::PhysicalVolume { root, depth_limit: depth })
    }

    // ---- scenes ---------------------------------------------------------

    pub fn scenes(&self) -> &[Scene] {
        &self.scenes
    }

    pub fn scene(&self, name: &str) -> Option<&Scene> {
        self.scenes.iter().find(|s| s.name == name)
    }

    pub fn current_scene(&self) -> Option<&Scene> {
        self.current_scene.map(|i| &self.scenes[i])
    }

    /// Creates an empty scene and makes it current; an empty name becomes `scene-N`.
    pub fn create_scene(&mut self, name: &str) -> Result<String, KernelError> {
        let name = if name.is_empty() {
            loop {
                let n = format!("scene-{}", self.scene_counter);
                self.scene_counter += 1;
                if self.scene(&n).is_none() {
                    break n;
                }
            }
        } else {
            name.to_string()
        };
        if self.scene(&name).is_some() {
            return Err(KernelError::DuplicateScene(name));
        }
        self.scenes.push(Scene::new(name.clone()));
        self.current_scene = Some(self.scenes.len() - 1);
        self.note(Verbosity::Confirmations, format!("scene \"{name}\" created"));
        Ok(name)
    }

    pub fn select_scene(&mut self, name: &str) -> Result<(), KernelError> {
        let i =
            self.scenes.iter().position(|s| s.name == name).ok_or_else(|| KernelError::UnknownScene(name.into()))?;
        self.current_scene = Some(i);
        Ok(())
    }

    /// Applies `f` to the current scene, then refreshes viewers of that scene.
    /// The scene is left untouched when `f` fails.
    pub fn edit_current_scene<R>(
        &mut self,
        f: impl FnOnce(&mut Scene, &Geometry) -> Result<R, KernelError>,
    ) -> Result<R, KernelError> {
        let i = self.current_scene.ok_or(KernelError::NoScene)?;
        let mut scene = self.scenes[i].clone();
        let r = f(&mut scene, &self.geometry)?;
        let name = scene.name.clone();
        self.scenes[i] = scene;
        self.touch_viewers(|s| s == name)?;
        Ok(r)
    }

    pub fn add_model(&mut self, model: Model) -> Result<(), KernelError> {
        let desc = model.description();
        self.edit_current_scene(|s, g| Ok(s.add_model(model, g)?))?;
        self.note(Verbosity::Confirmations, format!("{desc} added to scene"));
        Ok(())
    }

    pub fn set_end_of_event_action(&mut self, action: EndOfEventAction) -> Result<(), KernelError> {
        self.edit_current_scene(|s, _| {
            s.end_of_event_action = action;
            Ok(())
        })
    }

    /// Attaches the current scene to the current viewer's scene handler.
    pub fn attach_current_scene(&mut self) -> Result<(), KernelError> {
        let v = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        let s = self.current_scene.ok_or(KernelError::NoScene)?;
        let h = self.viewers[v].handler;
        self.handlers[h].scene = self.scenes[s].name.clone();
        let name = self.handlers[h].name.clone();
        self.touch_viewers_where(|m, i| m.viewers[i].handler == h)?;
        self.note(Verbosity::Confirmations, format!("scene \"{}\" attached to \"{name}\"", self.scenes[s].name));
        Ok(())
    }

    /// Creates a scene holding the named volume (the world by default) and
    /// attaches it to the current viewer.
    pub fn draw_volume(
        &mut self,
        volume: Option<&str>,
        copy: Option<i32>,
        depth: Option<usize>,
    ) -> Result<(), KernelError> {
        if self.current_viewer.is_none() {
            return Err(KernelError::NoCurrentViewer);
        }
        let model = self.volume_model(volume, copy, depth)?;
        let previous = self.current_scene;
        let name = self.create_scene("")?;
        if let Err(e) = self.add_model(model) {
            self.scenes.retain(|s| s.name != name);
            self.current_scene = previous;
            return Err(e);
        }
        self.attach_current_scene()
    }

    // ---- viewers --------------------------------------------------------

    pub fn handlers(&self) -> &[SceneHandler] {
        &self.handlers
    }

    pub fn viewers(&self) -> &[Viewer] {
        &self.viewers
    }

    pub fn current_viewer(&self) -> Option<&Viewer> {
        self.current_viewer.map(|i| &self.viewers[i])
    }

    pub fn viewer(&self, name: &str) -> Option<&Viewer> {
        self.viewers.iter().find(|v| v.name == name || v.short_name == name)
    }

    /// Opens a scene handler and a viewer of `nickname`. The current scene is
    /// attached (an empty one is created if there is none) and the new viewer
    /// becomes current.
    pub fn open_viewer(&mut self, nickname: &str, window: &str) -> Result<String, KernelError> {
        let system = self.system(nickname)?.nickname.clone();
        let window: WindowGeometry = window.parse()?;
        if self.current_scene.is_none() {
            self.create_scene("")?;
        }
        let scene = self.current_scene().map(|s| s.name.clone()).ok_or(KernelError::NoScene)?;
        self.handlers.push(SceneHandler { name: format!("scene-handler-{}", self.handlers.len()), system, scene });
        self.add_viewer(self.handlers.len() - 1, window)
    }

    /// Adds another viewer to an existing scene handler and makes it current.
    pub fn open_viewer_on_handler(&mut self, handler: &str, window: &str) -> Result<String, KernelError> {
        let h = self
            .handlers
            .iter()
            .position(|x| x.name == handler)
            .ok_or_else(|| KernelError::UnknownHandler(handler.to_string()))?;
        self.add_viewer(h, window.parse()?)
    }

    fn add_viewer(&mut self, handler: usize, window: WindowGeometry) -> Result<String, KernelError> {
        let system = self.system(&self.handlers[handler].system)?;
        let view = ViewParameters { window, ..system.default_view.clone() };
        let auto_refresh = system.capabilities.retained_store;
        let nick = system.nickname.clone();
        let short_name = format!("viewer-{}", self.viewers.len());
        let name = format!("{short_name} ({nick})");
        self.viewers.push(Viewer {
            name: name.clone(),
            short_name,
            handler,
            view,
            auto_refresh,
            sequence: 0,
            user_transients: Vec::new(),
            needs_refresh: true,
        });
        self.current_viewer = Some(self.viewers.len() - 1);
        self.note(Verbosity::Confirmations, format!("viewer \"{name}\" opened"));
        Ok(name)
    }

    /// Makes the viewer named by full or short name current.
    pub fn select_viewer(&mut self, name: &str) -> Result<(), KernelError> {
        let i = self
            .viewers
            .iter()
            .position(|v| v.name == name || v.short_name == name)
            .ok_or_else(|| KernelError::UnknownViewer(name.to_string()))?;
        self.current_viewer = Some(i);
        let scene = self.handlers[self.viewers[i].handler].scene.clone();
        self.current_scene = self.scenes.iter().position(|s| s.name == scene);
        Ok(())
    }

    /// Applies `f` to a copy of the current view; on success the copy is kept
    /// and the viewer refreshed if auto refresh is on.
    pub fn update_view(
        &mut self,
        f: impl FnOnce(&mut ViewParameters) -> Result<(), ViewError>,
    ) -> Result<(), KernelError> {
        let i = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        let mut view = self.viewers[i].view.clone();
        f(&mut view)?;
        self.viewers[i].view = view;
        self.touch_viewers_where(|_, j| j == i)
    }

    /// Turning auto refresh on refreshes the viewer straight away.
    pub fn set_auto_refresh(&mut self, on: bool) -> Result<(), KernelError> {
        let i = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        self.viewers[i].auto_refresh = on;
        if on {
            self.issue(i)?;
        }
        Ok(())
    }

    /// Renders the current viewer.
    pub fn flush(&mut self) -> Result<(), KernelError> {
        let i = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        self.issue(i)
    }

    /// Discards user-drawn transients, then renders the current viewer.
    pub fn rebuild(&mut self) -> Result<(), KernelError> {
        let i = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        self.viewers[i].user_transients.clear();
        self.issue(i)
    }

    fn touch_viewers(&mut self, scene: impl Fn(&str) -> bool) -> Result<(), KernelError> {
        self.touch_viewers_where(|m, i| scene(&m.handlers[m.viewers[i].handler].scene))
    }

    /// Refreshes matching viewers that auto refresh and flags the others.
    fn touch_viewers_where(&mut self, pick: impl Fn(&Self, usize) -> bool) -> Result<(), KernelError> {
        for i in 0..self.viewers.len() {
            if !pick(self, i) {
                continue;
            }
            if self.viewers[i].auto_refresh {
                self.issue(i)?;
            } else {
                self.viewers[i].needs_refresh = true;
            }
        }
        Ok(())
    }

    pub fn date(&self) -> String {
        self.date_override.clone().unwrap_or_else(|| chrono::Local::now().format("%Y-%m-%d %H:%M:%S").to_string())
    }

    /// Events whose transients a viewer of `scene` shows.
    fn events_for(&self, scene: &Scene) -> Vec<&Event> {
        if scene.transient.is_empty() {
            return Vec::new();
        }
        match scene.end_of_event_action {
            EndOfEventAction::Accumulate => self.store.iter().collect(),
            EndOfEventAction::Refresh => self.store.latest().into_iter().collect(),
        }
    }

    /// Traverses the viewer's scene into a fresh driver instance and writes
    /// whatever it produces.
    fn issue(&mut self, i: usize) -> Result<(), KernelError> {
        let (viewer, handler) = (&self.viewers[i], &self.handlers[self.viewers[i].handler]);
        let scene = self.scene(&handler.scene).ok_or_else(|| KernelError::UnknownScene(handler.scene.clone()))?;
        let system = self.system(&handler.system)?;
        let date = self.date();
        let ctx = TraversalContext {
            geometry: &self.geometry,
            view: &viewer.view,
            events: self.events_for(scene),
            filters: &self.filters,
            model: self.current_model(),
            date: date.clone(),
            user_transients: &viewer.user_transients,
        };
        let setup = RenderSetup {
            geometry: &self.geometry,
            extent: scene.extent,
            timestamp: &date,
            atree_verbosity: self.atree_verbosity,
            threads: self.threads,
        };
        let mut renderer = (system.factory)(&setup);
        let (mut calls, mut counts) = (ProtocolRecorder::default(), CountingSink::default());
        {
            let mut inner = Tee::new(&mut counts, renderer.as_mut());
            let mut tee = Tee::new(&mut calls, &mut inner);
            traverse(scene, &mut tee, &ctx)?;
        }
        let outputs = renderer.finish()?;
        drop(renderer);
        let system = handler.system.clone();
        let (name, short, sequence) = (viewer.name.clone(), viewer.short_name.clone(), viewer.sequence);

        let mut files = Vec::new();
        for r in &outputs {
            if r.extension == "txt" {
                self.output.push_str(&String::from_utf8_lossy(&r.bytes));
            }
            if let Some(dir) = &self.out_dir {
                files.push(write_file(dir, &format!("{short}-{sequence:04}.{}", r.extension), &r.bytes)?);
            }
        }
        for f in &files {
            self.note(Verbosity::Confirmations, format!("{name}: wrote {}", f.display()));
        }
        let v = &mut self.viewers[i];
        v.sequence += 1;
        v.needs_refresh = false;
        self.records
            .insert(name.clone(), IssueRecord { viewer: name, system, sequence, calls, counts, outputs, files });
        Ok(())
    }

    /// The last rendering of the named viewer.
    pub fn last_issue(&self, viewer: &str) -> Option<&IssueRecord> {
        let v = self.viewer(viewer)?;
        self.records.get(&v.name)
    }

    /// The last rendering of the current viewer.
    pub fn last_current_issue(&self) -> Option<&IssueRecord> {
        self.records.get(&self.current_viewer()?.name)
    }

    /// Writes the current view as EPS, or SVG when `name` ends in `.svg`.
    /// Without a name the file is `<viewer>-<sequence>.eps`. Relative names
    /// resolve against the output directory.
    pub fn export(&mut self, name: Option<&str>) -> Result<PathBuf, KernelError> {
        let i = self.current_viewer.ok_or(KernelError::NoCurrentViewer)?;
        let viewer = &self.viewers[i];
        let scene_name = &self.handlers[viewer.handler].scene;
        let scene = self.scene(scene_name).ok_or_else(|| KernelError::UnknownScene(scene_name.clone()))?;
        let ctx = TraversalContext {
            geometry: &self.geometry,
            view: &viewer.view,
            events: self.events_for(scene),
            filters: &self.filters,
            model: self.current_model(),
            date: self.date(),
            user_transients: &viewer.user_transients,
        };
        let mut painter = VectorPainter::new(scene.extent);
        traverse(scene, &mut painter, &ctx)?;
        let file = name.map_or_else(|| format!("{}-{:04}.eps", viewer.short_name, viewer.sequence), str::to_string);
        let body = if file.to_ascii_lowercase().ends_with(".svg") { painter.svg() } else { painter.eps() };
        let dir = self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let path = write_file(&dir, &file, body.as_bytes())?;
        self.note(Verbosity::Confirmations, format!("exported {}", path.display()));
        Ok(path)
    }

    // ---- trajectory models and filters ----------------------------------

    pub fn models(&self) -> &[TrajectoryModel] {
        &self.models
    }

    /// The model used for drawing: the selected one, else a default by-charge model.
    pub fn current_model(&self) -> &TrajectoryModel {
        self.current_model.map_or(&self.default_model, |i| &self.models[i])
    }

    /// Creates a model of `kind` (`drawByCharge` or `drawByParticleID`) and
    /// selects it. Without a name it is called `<kind>-N`.
    pub fn create_model(&mut self, kind: &str, name: Option<&str>) -> Result<String, KernelError> {
        let name = name.map_or_else(|| format!("{kind}-{}", self.model_counter), str::to_string);
        let model = match kind {
            "drawByCharge" => TrajectoryModel::by_charge(name.clone()),
            "drawByParticleID" => TrajectoryModel::by_particle_id(name.clone()),
            other => return Err(KernelError::UnknownModelKind(other.to_string())),
        };
        self.model_counter += 1;
        self.models.push(model);
        self.current_model = Some(self.models.len() - 1);
        self.note(Verbosity::Confirmations, format!("trajectory model \"{name}\" created and selected"));
        self.touch_viewers(|_| true)?;
        Ok(name)
    }

    pub fn select_model(&mut self, name: &str) -> Result<(), KernelError> {
        let i =
            self.models.iter().position(|m| m.name == name).ok_or_else(|| KernelError::UnknownModel(name.into()))?;
        self.current_model = Some(i);
        self.touch_viewers(|_| true)
    }

    pub fn edit_model<R>(&mut self, name: &str, f: impl FnOnce(&mut TrajectoryModel) -> R) -> Result<R, KernelError> {
        let m =
            self.models.iter_mut().find(|m| m.name == name).ok_or_else(|| KernelError::UnknownModel(name.into()))?;
        let r = f(m);
        self.touch_viewers(|_| true)?;
        Ok(r)
    }

    pub fn filters(&self) -> &FilterChain {
        &self.filters
    }

    /// Creates a filter of `kind` (`particleFilter`, `chargeFilter` or
    /// `attributeFilter`) at the end of the chain.
    pub fn create_filter(&mut self, kind: &str, name: Option<&str>) -> Result<String, KernelError> {
        let name = name.map_or_else(|| format!("{kind}-{}", self.filter_counter), str::to_string);
        let filter = match kind {
            "particleFilter" => TrajectoryFilter::particle(name.clone(), []),
            "chargeFilter" => TrajectoryFilter::charge(name.clone(), []),
            "attributeFilter" => TrajectoryFilter::interval(name.clone(), "IKE", f64::NEG_INFINITY, f64::INFINITY),
            other => return Err(KernelError::UnknownFilterKind(other.to_string())),
        };
        self.filter_counter += 1;
        self.filters.filters.push(filter);
        self.note(Verbosity::Confirmations, format!("trajectory filter \"{name}\" created"));
        self.touch_viewers(|_| true)?;
        Ok(name)
    }

    pub fn edit_filter<R>(&mut self, name: &str, f: impl FnOnce(&mut TrajectoryFilter) -> R) -> Result<R, KernelError> {
        let filter = self.filters.get_mut(name).ok_or_else(|| KernelError::UnknownFilter(name.into()))?;
        let r = f(filter);
        self.touch_viewers(|_| true)?;
        Ok(r)
    }

    // ---- events ---------------------------------------------------------

    pub fn event_store(&self) -> &EventStore {
        &self.store
    }

    pub fn set_store_capacity(&mut self, capacity: usize) {
        self.store.set_capacity(capacity);
        if capacity == 0 {
            self.note(Verbosity::Warnings, "event store capacity is 0: events can no longer be redrawn");
        }
    }

    /// Queues events to be used by the next runs before any toy events.
    pub fn queue_events(&mut self, events: impl IntoIterator<Item = Event>) {
        self.pending_events.extend(events);
    }

    pub fn queued_events(&self) -> usize {
        self.pending_events.len()
    }

    pub fn run_number(&self) -> Option<u32> {
        self.run_number
    }

    /// Starts a run; events kept from earlier runs are dropped.
    pub fn begin_run(&mut self) {
        self.run_number = Some(self.run_number.map_or(0, |n| n + 1));
        self.run_active = true;
        self.store.clear();
    }

    /// Stores the event. In refresh mode the current viewer is redrawn with
    /// this event; in accumulate mode drawing waits for the end of the run.
    pub fn end_of_event(&mut self, event: Event) -> Result<(), KernelError> {
        self.store.push(event);
        let Some(i) = self.current_viewer else { return Ok(()) };
        let scene = self.scene(&self.handlers[self.viewers[i].handler].scene);
        match scene {
            Some(s) if !s.transient.is_empty() => match s.end_of_event_action {
                EndOfEventAction::Refresh => self.issue(i),
                EndOfEventAction::Accumulate => {
                    self.viewers[i].needs_refresh = true;
                    Ok(())
                }
            },
            _ => Ok(()),
        }
    }

    /// Ends the run and draws the accumulated events.
    pub fn end_of_run(&mut self) -> Result<(), KernelError> {
        self.run_active = false;
        let Some(i) = self.current_viewer else { return Ok(()) };
        let accumulate = self
            .scene(&self.handlers[self.viewers[i].handler].scene)
            .is_some_and(|s| !s.transient.is_empty() && s.end_of_event_action == EndOfEventAction::Accumulate);
        if accumulate {
            self.issue(i)?;
        }
        Ok(())
    }

    /// Simulates a run of `n` events: queued events first, then toy events.
    pub fn beam_on(&mut self, n: usize) -> Result<(), KernelError> {
        self.begin_run();
        let run = self.run_number.unwrap_or(0);
        let cfg = match self.geometry.world_touchable() {
            Ok(w) => ToyConfig::with_world(w.solid.bounding_box().transformed(&w.world_transform)),
            Err(_) => ToyConfig::default(),
        };
        for k in 0..n {
            let event = match self.pending_events.pop_front() {
                Some(e) => e,
                None => {
                    let seed = self.run.seed.wrapping_add((u64::from(run) << 32) | k as u64);
                    generate_toy_event(k as i32, seed, self.run.tracks_per_event, self.run.field_tesla, &cfg)
                }
            };
            if let Err(e) = self.end_of_event(event) {
                self.run_active = false;
                return Err(e);
            }
        }
        self.note(Verbosity::Confirmations, format!("run {run}: {n} events"));
        self.end_of_run()
    }

    pub fn run_active(&self) -> bool {
        self.run_active
    }

    // ---- user vis actions -----------------------------------------------

    pub fn user_vis_actions(&self) -> impl Iterator<Item = &str> {
        self.actions.keys().map(String::as_str)
    }

    /// Registers an action and adds it to the current scene as a permanent model.
    pub fn register_user_vis_action(&mut self, action: Arc<dyn UserVisAction>) -> Result<(), KernelError> {
        let name = action.name().to_string();
        if self.actions.contains_key(&name) {
            return Err(KernelError::DuplicateAction(name));
        }
        self.add_model(Model::User(action.clone()))?;
        self.actions.insert(name, action);
        Ok(())
    }

    /// Removes the action from the registry and from every scene.
    pub fn remove_user_vis_action(&mut self, name: &str) -> Result<(), KernelError> {
        if self.actions.remove(name).is_none() {
            return Err(KernelError::UnknownAction(name.to_string()));
        }
        let mut changed = Vec::new();
        for s in &mut self.scenes {
            let before = s.permanent.len();
            s.permanent.retain(|m| !matches!(m, Model::User(a) if a.name() == name));
            if s.permanent.len() != before {
                s.recompute_extent(&self.geometry)?;
                changed.push(s.name.clone());
            }
        }
        self.touch_viewers(|s| changed.iter().any(|c| c == s))
    }

    fn draw_user(&mut self, t: UserTransient) {
        let Some(i) = self.current_viewer else {
            self.note(Verbosity::Warnings, "no current viewer: drawing ignored");
            return;
        };
        self.viewers[i].user_transients.push(t);
        if let Err(e) = self.touch_viewers_where(|_, j| j == i) {
            self.note(Verbosity::Errors, e.to_string());
        }
    }

    // ---- state ----------------------------------------------------------

    /// Canonical text of everything that affects drawing.
    pub fn state_text(&self) -> String {
        let mut s = String::new();
        let systems: Vec<&str> = self.systems.iter().map(|x| x.nickname.as_str()).collect();
        writeln!(s, "systems {systems:?}").unwrap();
        for sc in &self.scenes {
            writeln!(s, "scene {} {:?} {:?}", sc.name, sc.end_of_event_action, sc.extent).unwrap();
            for m in sc.permanent.iter().chain(&sc.transient) {
                writeln!(s, "  {m:?}").unwrap();
            }
        }
        writeln!(s, "current scene {:?}", self.current_scene).unwrap();
        for h in &self.handlers {
            writeln!(s, "{h:?}").unwrap();
        }
        for v in &self.viewers {
            writeln!(
                s,
                "viewer {} handler {} {:?} auto {} seq {} pending {} user {:?}",
                v.name, v.handler, v.view, v.auto_refresh, v.sequence, v.needs_refresh, v.user_transients
            )
            .unwrap();
        }
        writeln!(s, "current viewer {:?}", self.current_viewer).unwrap();
        writeln!(s, "defaults {:?} verbosity {} atree {}", self.defaults, self.verbosity, self.atree_verbosity)
            .unwrap();
        writeln!(s, "models {:?} current {:?}", self.models, self.current_model).unwrap();
        writeln!(s, "filters {:?}", self.filters).unwrap();
        let ids: Vec<i32> = self.store.iter().map(|e| e.event_id).collect();
        writeln!(s, "store {} {ids:?} queued {}", self.store.capacity(), self.pending_events.len()).unwrap();
        writeln!(s, "actions {:?}", self.actions.keys().collect::<Vec<_>>()).unwrap();
        writeln!(s, "run {:?} {:?}", self.run_number, self.run).unwrap();
        writeln!(s, "geometry {:?}", self.geometry).unwrap();
        s
    }

    /// Hash of [`Self::state_text`]; equal states give equal digests.
    pub fn state_digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.state_text().hash(&mut h);
        h.finish()
    }

    /// Checks that every viewer's handler and every handler's scene exist and
    /// that the current viewer and scene are valid.
    pub fn check_consistency(&self) -> Result<(), String> {
        for v in &self.viewers {
            if v.handler >= self.handlers.len() {
                return Err(format!("viewer \"{}\" has no scene handler", v.name));
            }
        }
        for h in &self.handlers {
            if self.scene(&h.scene).is_none() {
                return Err(format!("scene handler \"{}\" refers to missing scene \"{}\"", h.name, h.scene));
            }
        }
        match self.current_viewer {
            None if !self.viewers.is_empty() => return Err("viewers exist but none is current".into()),
            Some(i) if i >= self.viewers.len() => return Err("current viewer out of range".into()),
            _ => {}
        }
        if self.current_scene.is_some_and(|i| i >= self.scenes.len()) {
            return Err("current scene out of range".into());
        }
        Ok(())
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, KernelError> {
    let path = dir.join(name);
    let io = |source| KernelError::Io { path: path.clone(), source };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(&path, bytes).map_err(io)?;
    Ok(path)
}

/// Immediate drawing into the current viewer. Such drawings are not
/// regenerated by a rebuild; use a [`UserVisAction`] for that.
impl DrawFacade for VisManager {
    fn draw_primitive(&mut self, p: &Primitive, transform: &Transform) {
        self.draw_user(UserTransient::Primitive { primitive: p.clone(), transform: *transform });
    }

    fn draw_primitive_2d(&mut self, p: &Primitive) {
        self.draw_user(UserTransient::Primitive2D(p.clone()));
    }

    fn draw_solid(&mut self, solid: &Solid, vis: &VisAttributes, transform: &Transform) {
        self.draw_user(UserTransient::Solid { solid: solid.clone(), vis: *vis, transform: *transform });
    }
}

/// Parses `name:copy/name:copy/...` (copy numbers default to 0).
pub fn parse_path(text: &str) -> Vec<PathElement> {
    text.split('/')
        .filter(|p| !p.is_empty())
        .map(|p| match p.rsplit_once(':') {
            Some((n, c)) if c.parse::<i32>().is_ok() => PathElement::new(n, c.parse().unwrap_or(0)),
            _ => PathElement::new(p, 0),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::Call;
    use crate::events::{StepPoint, Trajectory};
    use crate::geometry::fixtures;
    use crate::Vec3;

    fn b1() -> VisManager {
        let mut m = VisManager::new(fixtures::b1());
        m.date_override = Some("2000-01-01".into());
        m
    }

    #[test]
    fn verbosity_parsing() {
        assert_eq!("errors".parse::<Verbosity>().unwrap(), Verbosity::Errors);
        assert_eq!("Warnings".parse::<Verbosity>().unwrap(), Verbosity::Warnings);
        assert_eq!("2".parse::<Verbosity>().unwrap(), Verbosity::Errors);
        assert_eq!("99".parse::<Verbosity>().unwrap(), Verbosity::All);
        assert!("loud".parse::<Verbosity>().is_err());
    }

    #[test]
    fn registry_basics() {
        let mut m = b1();
        assert_eq!(m.systems().len(), 4);
        let dup = m.systems()[0].clone();
        assert!(matches!(m.register_system(dup), Err(KernelError::DuplicateSystem(_))));
        let err = m.open_viewer("OGL", "").unwrap_err().to_string();
        assert!(err.contains("ATree") && err.contains("SceneExport"), "{err}");
        assert!(matches!(m.draw_volume(None, None, None), Err(KernelError::NoCurrentViewer)));
        let name = m.open_viewer("SVG", "600x600-0+0").unwrap();
        assert_eq!(name, "viewer-0 (SVG)");
        let v = m.current_viewer().unwrap();
        assert!(v.view.window.anchored_right() && v.view.window.anchored_top());
        assert!(!v.auto_refresh);
        m.open_viewer("ATree", "").unwrap();
        assert_eq!(m.current_viewer().unwrap().short_name, "viewer-1");
        m.check_consistency().unwrap();
    }

    #[test]
    fn scene_names_and_duplicates() {
        let mut m = b1();
        assert_eq!(m.create_scene("").unwrap(), "scene-0");
        assert_eq!(m.create_scene("").unwrap(), "scene-1");
        assert!(matches!(m.create_scene("scene-0"), Err(KernelError::DuplicateScene(_))));
        assert_eq!(m.current_scene().unwrap().name, "scene-1");
    }

    #[test]
    fn auto_refresh_gates_output() {
        let mut m = b1();
        m.open_viewer("SVG", "").unwrap();
        m.draw_volume(None, None, None).unwrap();
        assert!(m.last_current_issue().is_none());
        m.update_view(|v| v.set_viewpoint(Vec3::new(-1.0, 0.0, 0.0))).unwrap();
        assert!(m.last_current_issue().is_none() && m.current_viewer().unwrap().needs_refresh);
        m.flush().unwrap();
        let rec = m.last_current_issue().unwrap();
        assert_eq!(rec.counts.solids, 4);
        assert!(rec.calls.is_balanced());
        m.set_auto_refresh(true).unwrap();
        assert_eq!(m.current_viewer().unwrap().sequence, 2);
        m.update_view(|v| v.set_zoom(2.0)).unwrap();
        assert_eq!(m.current_viewer().unwrap().sequence, 3);
    }

    #[test]
    fn bad_view_change_leaves_state() {
        let mut m = b1();
        m.open_viewer("SVG", "").unwrap();
        let before = m.state_digest();
        assert!(m.update_view(|v| v.set_viewpoint(Vec3::unit_y())).is_err());
        assert_eq!(m.state_digest(), before);
    }

    #[test]
    fn accumulate_versus_refresh() {
        for (action, expect_events) in [(EndOfEventAction::Accumulate, 10), (EndOfEventAction::Refresh, 1)] {
            let mut m = b1();
            m.run.tracks_per_event = 3;
            m.open_viewer("SVG", "").unwrap();
            m.draw_volume(None, None, None).unwrap();
            m.add_model(Model::Trajectories { draw_mode: Default::default(), point_size: 2.0 }).unwrap();
            m.set_end_of_event_action(action).unwrap();
            m.beam_on(10).unwrap();
            let rec = m.last_current_issue().unwrap();
            let ids: std::collections::BTreeSet<String> = rec
                .calls
                .calls
                .iter()
                .filter_map(|c| match c {
                    Call::AddTrajectory { attributes, .. } => {
                        crate::att::find(attributes, "EventID").map(str::to_string)
                    }
                    _ => None,
                })
                .collect();
            assert_eq!(ids.len(), expect_events, "{action:?}");
            if action == EndOfEventAction::Refresh {
                assert!(ids.contains("9"));
            }
        }
    }

    #[test]
    fn switching_viewer_reproduces_transients() {
        let mut m = b1();
        m.run.tracks_per_event = 4;
        m.open_viewer("SVG", "").unwrap();
        m.draw_volume(None, None, None).unwrap();
        m.add_model(Model::Trajectories { draw_mode: Default::default(), point_size: 2.0 }).unwrap();
        m.set_end_of_event_action(EndOfEventAction::Accumulate).unwrap();
        m.beam_on(3).unwrap();
        let first = m.last_current_issue().unwrap().calls.transient_calls().into_iter().cloned().collect::<Vec<_>>();
        assert!(!first.is_empty());
        m.open_viewer("SceneExport", "").unwrap();
        m.flush().unwrap();
        let second = m.last_current_issue().unwrap().calls.transient_calls().into_iter().cloned().collect::<Vec<_>>();
        assert_eq!(first, second);
    }

    struct Marker;

    impl UserVisAction for Marker {
        fn name(&self) -> &str {
            "marker"
        }
        fn draw(&self, canvas: &mut dyn DrawFacade) {
            let vis = VisAttributes::with_colour(Colour::RED);
            canvas
                .draw_primitive(&Primitive::Circle { position: Vec3::zero(), size: 4.0, vis }, &Transform::identity());
        }
    }

    #[test]
    fn user_drawings_and_actions() {
        let mut m = b1();
        m.draw_primitive(
            &Primitive::Circle { position: Vec3::zero(), size: 3.0, vis: VisAttributes::default() },
            &Transform::identity(),
        );
        assert!(m.take_messages().iter().any(|(_, t)| t.contains("no current viewer")));
        m.open_viewer("SVG", "").unwrap();
        m.draw_volume(None, None, None).unwrap();
        let text = Primitive::Text {
            position: Vec3::new(0.0, -0.9, 0.0),
            content: "t".into(),
            size: 12.0,
            layout: TextLayout::Left,
            offset: (0.0, 0.0),
            vis: VisAttributes::default(),
        };
        m.draw_primitive_2d(&text);
        m.flush().unwrap();
        assert_eq!(m.last_current_issue().unwrap().counts.primitives_2d, 1);
        m.rebuild().unwrap();
        assert_eq!(m.last_current_issue().unwrap().counts.primitives_2d, 0);

        m.register_user_vis_action(Arc::new(Marker)).unwrap();
        assert!(matches!(m.register_user_vis_action(Arc::new(Marker)), Err(KernelError::DuplicateAction(_))));
        m.rebuild().unwrap();
        let a = m.last_current_issue().unwrap().calls.calls.clone();
        m.rebuild().unwrap();
        assert_eq!(a, m.last_current_issue().unwrap().calls.calls);
        let circles = |m: &VisManager| {
            m.last_current_issue()
                .unwrap()
                .calls
                .primitives()
                .iter()
                .filter(|p| matches!(p, Primitive::Circle { .. }))
                .count()
        };
        assert_eq!(circles(&m), 1);
        m.remove_user_vis_action("marker").unwrap();
        m.rebuild().unwrap();
        assert_eq!(circles(&m), 0);
    }

    #[test]
    fn queued_events_come_first() {
        let mut m = b1();
        let t = Trajectory {
            track_id: 1,
            parent_id: 0,
            particle_name: "gamma".into(),
            pdg_encoding: 22,
            charge: 0.0,
            initial_kinetic_energy: 1.0,
            initial_momentum: Vec3::unit_x(),
            points: vec![StepPoint { position: Vec3::zero(), energy_deposit: 0.0 }],
            creator_process: String::new(),
        };
        m.queue_events([Event { event_id: 42, trajectories: vec![t], hits: vec![] }]);
        m.beam_on(2).unwrap();
        let ids: Vec<i32> = m.event_store().iter().map(|e| e.event_id).collect();
        assert_eq!(ids, [42, 1]);
        assert_eq!(m.run_number(), Some(0));
    }

    #[test]
    fn models_and_filters_named_by_counter() {
        let mut m = b1();
        assert_eq!(m.create_model("drawByCharge", None).unwrap(), "drawByCharge-0");
        assert_eq!(m.current_model().name, "drawByCharge-0");
        m.edit_model("drawByCharge-0", |x| x.draw_step_points = true).unwrap();
        assert!(m.current_model().draw_step_points);
        assert_eq!(m.create_filter("particleFilter", None).unwrap(), "particleFilter-0");
        assert!(m.edit_filter("particleFilter-0", |f| f.add("gamma")).unwrap());
        assert!(matches!(m.create_model("drawByColour", None), Err(KernelError::UnknownModelKind(_))));
        assert!(matches!(m.edit_filter("nope", |_| ()), Err(KernelError::UnknownFilter(_))));
    }

    #[test]
    fn atree_writes_text_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = b1();
        m.out_dir = Some(dir.path().to_path_buf());
        m.atree_verbosity = 0;
        m.open_viewer("ATree", "").unwrap();
        m.draw_volume(None, None, None).unwrap();
        m.flush().unwrap();
        assert!(m.take_output().contains("    \"Shape2\":0"));
        assert!(dir.path().join("viewer-0-0000.txt").exists());
        let eps = m.export(None).unwrap();
        assert!(std::fs::read_to_string(eps).unwrap().starts_with("%!PS-Adobe-3.0 EPSF-3.0"));
    }

    #[test]
    fn multiple_viewers_per_handler() {
        let mut m = b1();
        m.open_viewer("SVG", "").unwrap();
        m.open_viewer_on_handler("scene-handler-0", "300x300").unwrap();
        assert_eq!(m.viewers().len(), 2);
        assert_eq!(m.viewers()[1].handler, 0);
        m.draw_volume(None, None, None).unwrap();
        for v in ["viewer-0", "viewer-1"] {
            m.select_viewer(v).unwrap();
            m.flush().unwrap();
            assert_eq!(m.last_issue(v).unwrap().counts.solids, 4);
        }
        m.check_consistency().unwrap();
    }

    #[test]
    fn paths() {
        let p = parse_path("World:0/Envelope:0/Shape1");
        assert_eq!(
            p,
            vec![PathElement::new("World", 0), PathElement::new("Envelope", 0), PathElement::new("Shape1", 0)]
        );
    }
}
