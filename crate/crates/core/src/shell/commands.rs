use std::fmt::Write as _;
use std::path::Path;

use crate::colour::Colour;
use crate::geometry::{ForcedStyle, LineStyle, PathElement, VisPatch};
use crate::kernel::{Verbosity, VisManager};
use crate::math::Axis;
use crate::scene::{EndOfEventAction, Model, TextLayout, TrajectoryDrawMode};
use crate::units::{best_unit, Category};
use crate::view::{DrawingStyle, Projection};
use crate::Vec3;

use super::{Args, Invocation, Outcome, Param, ParamKind, Shell, ShellError};

use ParamKind::{Bool, Choice, Double, Int, Str, Text, Unit};

type R = Result<Outcome, ShellError>;

const LENGTH: ParamKind = Unit(Category::Length);
const ANGLE: ParamKind = Unit(Category::Angle);
const LAYOUTS: &[&str] = &["left", "centre", "center", "right"];
const LINE_STYLES: &[&str] = &["unbroken", "dashed", "dotted"];

fn req(name: &'static str, kind: ParamKind) -> Param {
    Param::required(name, kind)
}

fn opt(name: &'static str, kind: ParamKind, default: &'static str) -> Param {
    Param::optional(name, kind, default)
}

/// `red_or_string green blue opacity`, all omittable.
fn colour_params(default: &'static str) -> Vec<Param> {
    vec![
        opt("red_or_string", Str, default),
        opt("green", Double, "1"),
        opt("blue", Double, "1"),
        opt("opacity", Double, "1"),
    ]
}

/// A colour from a name or from numeric components.
fn colour(a: &Args) -> Result<Colour, ShellError> {
    let first = a.str("red_or_string");
    let alpha = a.f64("opacity");
    if let Ok(r) = first.parse::<f64>() {
        return Ok(Colour::new(r, a.f64("green"), a.f64("blue"), alpha));
    }
    let c = Colour::named(first).ok_or_else(|| {
        ShellError::Invalid(format!(
            "unknown colour \"{first}\"; use white, black, red, green, blue, cyan, magenta, yellow, grey, brown or r g b [a]"
        ))
    })?;
    Ok(Colour::new(c.r, c.g, c.b, alpha))
}

fn with<T>(params: Vec<Param>, more: T) -> Vec<Param>
where
    T: IntoIterator<Item = Param>,
{
    params.into_iter().chain(more).collect()
}

fn layout(s: &str) -> TextLayout {
    match s {
        "centre" | "center" => TextLayout::Centre,
        "right" => TextLayout::Right,
        _ => TextLayout::Left,
    }
}

fn line_style(s: &str) -> LineStyle {
    match s {
        "dashed" => LineStyle::Dashed,
        "dotted" => LineStyle::Dotted,
        _ => LineStyle::Solid,
    }
}

fn depth_arg(d: i64) -> Option<usize> {
    (d >= 0).then_some(d as usize)
}

fn vec3(a: &Args, x: &str, y: &str, z: &str) -> Vec3 {
    Vec3::new(a.f64(x), a.f64(y), a.f64(z))
}

fn done() -> R {
    Ok(Outcome::Done)
}

pub(super) fn register_builtin(s: &mut Shell) {
    control(s);
    vis_top(s);
    viewer(s);
    scene(s);
    modeling(s);
    geometry(s);
    touchable(s);
    set(s);
}

fn control(s: &mut Shell) {
    s.add_command(
        "/control/execute",
        "Execute the commands in a macro file. Execution stops at the first error.",
        vec![req("macroFile", Str)],
        |sh, i| sh.run_macro(Path::new(i.args.str("macroFile"))),
    );
    s.add_command(
        "/control/verbose",
        "Accepted for compatibility; has no effect.",
        vec![opt("level", Int, "0")],
        |_, _| done(),
    );
    s.add_command(
        "/run/beamOn",
        "Simulate a run: events from --events first, then toy events, each passed through end of event.",
        vec![opt("numberOfEvent", Int, "1")],
        |sh, i| {
            let n = i.args.int("numberOfEvent");
            if n < 0 {
                return Err(ShellError::Invalid("number of events must not be negative".into()));
            }
            sh.vis.beam_on(n as usize)?;
            done()
        },
    );
}

fn vis_top(s: &mut Shell) {
    s.add_command(
        "/vis/open",
        "Create a scene handler and viewer for a graphics system. Window geometry is WxH[±X±Y].",
        vec![req("graphics-system-name", Str), opt("window-size-hint", Str, "")],
        |sh, i| {
            let name = sh.vis.open_viewer(i.args.str("graphics-system-name"), i.args.str("window-size-hint"))?;
            sh.vis.note(Verbosity::Confirmations, format!("current viewer is \"{name}\""));
            done()
        },
    );
    s.add_command("/vis/list", "List graphics systems, scenes and viewers.", vec![], |sh, _| {
        let text = listing(&sh.vis);
        sh.print(text);
        done()
    });
    s.add_command(
        "/vis/drawVolume",
        "Create a scene with the named physical volume (the world by default) and attach it to the current viewer.",
        vec![opt("physical-volume-name", Str, "world"), opt("copy-no", Int, "-1"), opt("depth", Int, "-1")],
        |sh, i| {
            let (name, copy) = volume_args(&sh.vis, &i.args);
            sh.vis.draw_volume(name.as_deref(), copy, depth_arg(i.args.int("depth")))?;
            done()
        },
    );
    s.add_command(
        "/vis/verbose",
        "Set the level of kernel messages: quiet, startup, errors, warnings, confirmations, parameters, all (or 0-6).",
        vec![opt("verbosity", Str, "warnings")],
        |sh, i| {
            let v = i.args.str("verbosity").parse::<Verbosity>().map_err(ShellError::Invalid)?;
            sh.vis.set_verbosity(v);
            done()
        },
    );
    s.add_command(
        "/vis/ASCIITree/verbose",
        "Detail of the ASCII tree: <10 collapses repeated placements, >=10 prints all; units digit selects columns.",
        vec![opt("verbosity", Int, "1")],
        |sh, i| {
            sh.vis.atree_verbosity = i.args.int("verbosity") as i32;
            done()
        },
    );
    s.add_command(
        "/vis/export",
        "Write the current view as EPS, or SVG for a .svg name. Default name <viewer>-<sequence>.eps in the output directory.",
        vec![opt("file", Str, "")],
        |sh, i| {
            let f = i.args.str("file");
            let path = sh.vis.export((!f.is_empty()).then_some(f))?;
            sh.vis.note(Verbosity::Warnings, format!("view exported to {}", path.display()));
            done()
        },
    );
    s.add_command(
        "/vis/sceneHandler/attach",
        "Attach the named scene (the current scene by default) to the current viewer's scene handler.",
        vec![opt("scene-name", Str, "")],
        |sh, i| {
            let name = i.args.str("scene-name");
            if !name.is_empty() {
                sh.vis.select_scene(name)?;
            }
            sh.vis.attach_current_scene()?;
            done()
        },
    );
}

/// Name and copy number for volume commands; `world` means the world volume.
fn volume_args(vis: &VisManager, a: &Args) -> (Option<String>, Option<i32>) {
    let name = a.str("physical-volume-name");
    let copy = a.int("copy-no");
    let world = vis.geometry().world_touchable().ok().map(|t| t.name().to_string());
    let name = if name.eq_ignore_ascii_case("world") && world.as_deref() != Some(name) {
        None
    } else {
        Some(name.to_string())
    };
    (name, (copy >= 0).then_some(copy as i32))
}

fn listing(vis: &VisManager) -> String {
    let mut out = String::from("Registered graphics systems:\n");
    for s in vis.systems() {
        let c = s.capabilities;
        let flags: Vec<&str> = [
            (c.retained_store, "retained"),
            (c.renders_2d, "2d"),
            (c.picking_attvalues, "attributes"),
            (c.geometry_only, "geometry-only"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        writeln!(out, "  {} ({}): {}", s.nickname, flags.join(", "), s.description).unwrap();
    }
    out.push_str("Scenes:\n");
    let current = vis.current_scene().map(|s| s.name.clone());
    for sc in vis.scenes() {
        let mark = if Some(&sc.name) == current.as_ref() { " (current)" } else { "" };
        writeln!(out, "  {}{mark}: {} permanent, {} transient models", sc.name, sc.permanent.len(), sc.transient.len())
            .unwrap();
    }
    out.push_str("Viewers:\n");
    let current = vis.current_viewer().map(|v| v.name.clone());
    for v in vis.viewers() {
        let mark = if Some(&v.name) == current.as_ref() { " (current)" } else { "" };
        let h = &vis.handlers()[v.handler];
        writeln!(out, "  {}{mark}: {} showing scene \"{}\"", v.name, h.name, h.scene).unwrap();
    }
    out.trim_end().to_string()
}

fn viewer(s: &mut Shell) {
    s.add_command("/vis/viewer/flush", "Render the current viewer.", vec![], |sh, _| {
        sh.vis.flush()?;
        done()
    });
    s.add_command("/vis/viewer/refresh", "Render the current viewer.", vec![], |sh, _| {
        sh.vis.flush()?;
        done()
    });
    s.add_command(
        "/vis/viewer/rebuild",
        "Discard immediate user drawings and render the current viewer from the kernel.",
        vec![],
        |sh, _| {
            sh.vis.rebuild()?;
            done()
        },
    );
    s.add_command("/vis/viewer/select", "Make a viewer current.", vec![req("viewer-name", Str)], |sh, i| {
        sh.vis.select_viewer(i.args.str("viewer-name"))?;
        done()
    });
    s.add_command("/vis/viewer/zoom", "Multiply the zoom factor.", vec![opt("multiplier", Double, "1")], |sh, i| {
        let m = i.args.f64("multiplier");
        sh.vis.update_view(|v| v.set_zoom(v.zoom * m))?;
        done()
    });
    s.add_command("/vis/viewer/zoomTo", "Set the zoom factor.", vec![opt("factor", Double, "1")], |sh, i| {
        let f = i.args.f64("factor");
        sh.vis.update_view(|v| v.set_zoom(f))?;
        done()
    });
    s.add_command(
        "/vis/viewer/set/autoRefresh",
        "Render after every change of view or scene. Turning it on renders at once.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            sh.vis.set_auto_refresh(i.args.bool("flag"))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/viewpointVector",
        "Direction from the target to the camera.",
        vec![opt("x", Double, "1"), opt("y", Double, "1"), opt("z", Double, "1")],
        |sh, i| {
            let d = vec3(&i.args, "x", "y", "z");
            sh.vis.update_view(|v| v.set_viewpoint(d))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/viewpointThetaPhi",
        "Camera direction (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)).",
        vec![opt("theta", Double, "60"), opt("phi", Double, "45"), opt("unit", ANGLE, "deg")],
        |sh, i| {
            let u = i.args.unit("unit");
            let (t, p) = (i.args.f64("theta") * u, i.args.f64("phi") * u);
            sh.vis.update_view(|v| v.set_viewpoint_theta_phi(t, p))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/lightsVector",
        "Direction from the target towards the light.",
        vec![opt("x", Double, "1"), opt("y", Double, "1"), opt("z", Double, "1")],
        |sh, i| {
            let d = vec3(&i.args, "x", "y", "z");
            sh.vis.update_view(|v| v.set_light(d))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/upVector",
        "Direction that appears upwards on screen.",
        vec![opt("x", Double, "0"), opt("y", Double, "1"), opt("z", Double, "0")],
        |sh, i| {
            let d = vec3(&i.args, "x", "y", "z");
            sh.vis.update_view(|v| v.set_up(d))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/style",
        "Drawing style of solids.",
        vec![req("style", Choice(&["wireframe", "surface", "w", "s"]))],
        |sh, i| {
            let style =
                if i.args.str("style").starts_with('w') { DrawingStyle::Wireframe } else { DrawingStyle::Surface };
            sh.vis.update_view(|v| {
                v.style = style;
                Ok(())
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/auxiliaryEdge",
        "Draw the edges that only approximate curved surfaces.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.update_view(|v| {
                v.auxiliary_edges = f;
                Ok(())
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/hiddenMarker",
        "Let solids hide markers and text behind them.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.update_view(|v| {
                v.hidden_marker = f;
                Ok(())
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/lineSegmentsPerCircle",
        "Number of straight segments approximating a full circle.",
        vec![opt("segments", Int, "24")],
        |sh, i| {
            let n = i.args.int("segments").max(0) as usize;
            sh.vis.update_view(|v| v.set_segments_per_circle(n))?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/projection",
        "Orthogonal or perspective projection; the angle is the half field of view.",
        vec![
            opt("projection", Choice(&["orthogonal", "o", "perspective", "p"]), "orthogonal"),
            opt("field-half-angle", Double, "30"),
            opt("unit", ANGLE, "deg"),
        ],
        |sh, i| {
            let half = i.args.f64("field-half-angle") * i.args.unit("unit");
            let proj = if i.args.str("projection").starts_with('p') {
                if !(half > 0.0 && half < std::f64::consts::FRAC_PI_2) {
                    return Err(ShellError::Invalid("field half angle must lie in (0, 90) deg".into()));
                }
                Projection::Perspective { fov: 2.0 * half }
            } else {
                Projection::Orthographic
            };
            sh.vis.update_view(|v| {
                v.projection = proj;
                Ok(())
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/background",
        "Background colour, by name or r g b [a].",
        colour_params("white"),
        |sh, i| {
            let c = colour(&i.args)?;
            sh.vis.update_view(|v| {
                v.background = c;
                Ok(())
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/viewer/set/culling",
        "Culling of invisible volumes; turning global culling off shows everything.",
        vec![opt("culling-type", Choice(&["global", "invisible"]), "global"), opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.update_view(|v| {
                v.culling_invisible = f;
                Ok(())
            })?;
            done()
        },
    );
}

fn scene(s: &mut Shell) {
    s.add_command(
        "/vis/scene/create",
        "Create an empty scene and make it current. Without a name it is called scene-N.",
        vec![opt("scene-name", Str, "")],
        |sh, i| {
            sh.vis.create_scene(i.args.str("scene-name"))?;
            done()
        },
    );
    s.add_command("/vis/scene/select", "Make a scene current.", vec![req("scene-name", Str)], |sh, i| {
        sh.vis.select_scene(i.args.str("scene-name"))?;
        done()
    });
    s.add_command("/vis/scene/list", "List scenes and their models.", vec![], |sh, _| {
        let mut out = String::new();
        for sc in sh.vis.scenes() {
            writeln!(
                out,
                "{} ({:?}, radius {})",
                sc.name,
                sc.end_of_event_action,
                best_unit(sc.extent.radius.max(0.0), Category::Length)
            )
            .unwrap();
            for m in sc.permanent.iter().chain(&sc.transient) {
                writeln!(out, "  {}", m.description()).unwrap();
            }
        }
        sh.print(out.trim_end().to_string());
        done()
    });
    s.add_command(
        "/vis/scene/endOfEventAction",
        "refresh: show only the latest event. accumulate: superimpose the events of a run. \
         maxNumber sets how many events are kept (negative: unlimited).",
        vec![opt("action", Choice(&["refresh", "accumulate"]), "refresh"), opt("maxNumber", Int, "100")],
        |sh, i| {
            let action = if i.args.str("action") == "accumulate" {
                EndOfEventAction::Accumulate
            } else {
                EndOfEventAction::Refresh
            };
            sh.vis.set_end_of_event_action(action)?;
            let n = i.args.int("maxNumber");
            sh.vis.set_store_capacity(if n < 0 { usize::MAX } else { n as usize });
            done()
        },
    );
    s.add_command(
        "/vis/scene/add/volume",
        "Add a physical volume subtree (the world by default) to the current scene.",
        vec![opt("physical-volume-name", Str, "world"), opt("copy-no", Int, "-1"), opt("depth", Int, "-1")],
        |sh, i| {
            let (name, copy) = volume_args(&sh.vis, &i.args);
            let model = sh.vis.volume_model(name.as_deref(), copy, depth_arg(i.args.int("depth")))?;
            sh.vis.add_model(model)?;
            done()
        },
    );
    s.add_command(
        "/vis/scene/add/trajectories",
        "Draw trajectories at end of event. Options (smooth, rich) are accepted and ignored.",
        vec![opt("options", Text, "")],
        |sh, i| {
            let m = sh.vis.current_model();
            let draw_mode = match (m.draw_line, m.draw_step_points) {
                (true, true) => TrajectoryDrawMode::Both,
                (false, true) => TrajectoryDrawMode::StepPoints,
                _ => TrajectoryDrawMode::Line,
            };
            let point_size = m.step_point_size;
            sh.vis.add_model(Model::Trajectories { draw_mode, point_size })?;
            let opts = i.args.str("options");
            if !opts.is_empty() {
                sh.vis.note(Verbosity::Confirmations, format!("trajectory options \"{opts}\" have no effect here"));
            }
            done()
        },
    );
    s.add_command("/vis/scene/add/hits", "Draw hits at end of event.", vec![], |sh, _| {
        sh.vis.add_model(Model::Hits)?;
        done()
    });
    s.add_command(
        "/vis/scene/add/axes",
        "Axes at the given origin: x red, y green, z blue. A non-positive length is chosen from the scene.",
        vec![
            opt("x0", Double, "0"),
            opt("y0", Double, "0"),
            opt("z0", Double, "0"),
            opt("length", Double, "-1"),
            opt("unit", LENGTH, "m"),
        ],
        |sh, i| {
            let u = i.args.unit("unit");
            let origin = vec3(&i.args, "x0", "y0", "z0") * u;
            let length = match i.args.f64("length") {
                l if l > 0.0 => l * u,
                _ => sh.vis.current_scene().ok_or(crate::kernel::KernelError::NoScene)?.default_axes_length(),
            };
            sh.vis.add_model(Model::Axes { origin, length })?;
            done()
        },
    );
    s.add_command(
        "/vis/scene/add/scale",
        "A ruler centred on the scene. A non-positive length is 1, 2 or 5 x 10^n mm near a fifth of the scene radius.",
        vec![
            opt("length", Double, "-1"),
            opt("unit", LENGTH, "m"),
            opt("direction", Choice(&["auto", "x", "y", "z"]), "auto"),
        ],
        |sh, i| {
            let scene = sh.vis.current_scene().ok_or(crate::kernel::KernelError::NoScene)?;
            let length = match i.args.f64("length") {
                l if l > 0.0 => l * i.args.unit("unit"),
                _ => scene.default_scale_length(),
            };
            let direction = match i.args.str("direction") {
                "y" => Axis::Y,
                "z" => Axis::Z,
                _ => Axis::X,
            };
            let centre = if scene.extent.is_empty() { Vec3::zero() } else { scene.extent.centre };
            let position = centre - direction.unit::<f64>() * (length / 2.0);
            let vis = sh.vis.defaults.vis();
            sh.vis.add_model(Model::Scale { position, length, direction, vis })?;
            done()
        },
    );
    s.add_command(
        "/vis/scene/add/text",
        "Text at a 3D position. Size in points; offsets in pixels.",
        vec![
            req("x", Double),
            req("y", Double),
            req("z", Double),
            req("unit", LENGTH),
            opt("font_size", Double, "12"),
            opt("x_offset", Double, "0"),
            opt("y_offset", Double, "0"),
            opt("text", Text, "Text"),
        ],
        |sh, i| {
            let a = &i.args;
            let d = sh.vis.defaults;
            sh.vis.add_model(Model::Text3D {
                position: vec3(a, "x", "y", "z") * a.unit("unit"),
                size: positive(a, "font_size")?,
                offset: (a.f64("x_offset"), a.f64("y_offset")),
                content: a.str("text").to_string(),
                layout: d.text_layout,
                vis: d.text_vis(),
            })?;
            done()
        },
    );
    s.add_command(
        "/vis/scene/add/text2D",
        "Text at viewport coordinates in [-1, 1]. Size in points; offsets in pixels.",
        vec![
            opt("x", Double, "0"),
            opt("y", Double, "0"),
            opt("font_size", Double, "12"),
            opt("x_offset", Double, "0"),
            opt("y_offset", Double, "0"),
            opt("text", Text, "Text"),
        ],
        |sh, i| {
            let a = &i.args;
            let d = sh.vis.defaults;
            sh.vis.add_model(Model::Text2D {
                x: a.f64("x"),
                y: a.f64("y"),
                size: positive(a, "font_size")?,
                offset: (a.f64("x_offset"), a.f64("y_offset")),
                content: a.str("text").to_string(),
                layout: d.text_layout,
                vis: d.text_vis(),
            })?;
            done()
        },
    );
    s.add_command("/vis/scene/add/frame", "A frame just inside the edges of the view.", vec![], |sh, _| {
        let vis = sh.vis.defaults.vis();
        sh.vis.add_model(Model::Frame { vis })?;
        done()
    });
    s.add_command(
        "/vis/scene/add/eventID",
        "Event number, drawn bottom left at end of event.",
        vec![opt("size", Double, "12")],
        |sh, i| {
            let (size, vis) = (positive(&i.args, "size")?, sh.vis.defaults.text_vis());
            sh.vis.add_model(Model::EventId { size, vis })?;
            done()
        },
    );
    s.add_command("/vis/scene/add/date", "Date stamp, drawn top right.", vec![opt("size", Double, "12")], |sh, i| {
        let (size, vis) = (positive(&i.args, "size")?, sh.vis.defaults.text_vis());
        sh.vis.add_model(Model::DateStamp { size, vis })?;
        done()
    });
    s.add_command("/vis/scene/add/logo2D", "A text logo in the viewport.", vec![opt("size", Double, "48")], |sh, i| {
        let (size, vis) = (positive(&i.args, "size")?, sh.vis.defaults.text_vis());
        sh.vis.add_model(Model::Logo2D { size, vis })?;
        done()
    });
    s.add_command(
        "/vis/scene/add/logo",
        "3D logo. Recognised but not supported; nothing is added.",
        vec![opt("options", Text, "")],
        |_, _| Ok(Outcome::Warning("/vis/scene/add/logo (3D logo) is not supported; command ignored".into())),
    );
}

fn positive(a: &Args, name: &str) -> Result<f64, ShellError> {
    let v = a.f64(name);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ShellError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

fn modeling(s: &mut Shell) {
    for kind in ["drawByCharge", "drawByParticleID"] {
        let path = format!("/vis/modeling/trajectories/create/{kind}");
        s.add_command(
            &path,
            "Create a trajectory model, select it and add its commands. Without a name it is called <kind>-N.",
            vec![opt("model-name", Str, "")],
            |sh, i| {
                let kind = i.segment(4).to_string();
                let name = i.args.str("model-name");
                let name = sh.vis.create_model(&kind, (!name.is_empty()).then_some(name))?;
                add_model_commands(sh, &name, kind == "drawByParticleID");
                done()
            },
        );
    }
    s.add_command(
        "/vis/modeling/trajectories/select",
        "Select a trajectory model.",
        vec![req("model-name", Str)],
        |sh, i| {
            sh.vis.select_model(i.args.str("model-name"))?;
            done()
        },
    );
    s.add_command("/vis/modeling/trajectories/list", "List trajectory models.", vec![], |sh, _| {
        let current = sh.vis.current_model().name.clone();
        let text: Vec<String> = sh
            .vis
            .models()
            .iter()
            .map(|m| format!("{}{} ({})", m.name, if m.name == current { " (current)" } else { "" }, m.kind_name()))
            .collect();
        sh.print(if text.is_empty() { "no trajectory models; drawing by charge".to_string() } else { text.join("\n") });
        done()
    });
    for kind in ["particleFilter", "chargeFilter", "attributeFilter"] {
        s.add_command(
            &format!("/vis/filtering/trajectories/create/{kind}"),
            "Create a trajectory filter at the end of the chain and add its commands.",
            vec![opt("filter-name", Str, "")],
            |sh, i| {
                let kind = i.segment(4).to_string();
                let name = i.args.str("filter-name");
                let name = sh.vis.create_filter(&kind, (!name.is_empty()).then_some(name))?;
                add_filter_commands(sh, &name, kind == "attributeFilter");
                done()
            },
        );
    }
    s.add_command("/vis/filtering/trajectories/list", "List trajectory filters.", vec![], |sh, _| {
        let text: Vec<String> = sh
            .vis
            .filters()
            .filters
            .iter()
            .map(|f| format!("{} ({}) {:?} invert {} active {}", f.name, f.kind_name(), f.kind, f.invert, f.active))
            .collect();
        sh.print(if text.is_empty() { "no trajectory filters".to_string() } else { text.join("\n") });
        done()
    });
}

/// Commands under `/vis/modeling/trajectories/<name>/`.
fn add_model_commands(s: &mut Shell, name: &str, by_particle: bool) {
    let base = format!("/vis/modeling/trajectories/{name}");
    s.add_command(
        &format!("{base}/default/setDrawStepPts"),
        "Draw a marker at every step point.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.edit_model(i.segment(3), |m| m.draw_step_points = f)?;
            done()
        },
    );
    s.add_command(
        &format!("{base}/default/setStepPtsSize"),
        "Step point marker size in pixels.",
        vec![opt("size", Double, "2")],
        |sh, i| {
            let v = positive(&i.args, "size")?;
            sh.vis.edit_model(i.segment(3), |m| m.step_point_size = v)?;
            done()
        },
    );
    s.add_command(
        &format!("{base}/default/setDrawLine"),
        "Draw the trajectory line.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.edit_model(i.segment(3), |m| m.draw_line = f)?;
            done()
        },
    );
    s.add_command(
        &format!("{base}/default/setLineWidth"),
        "Trajectory line width in pixels.",
        vec![opt("width", Double, "1")],
        |sh, i| {
            let v = positive(&i.args, "width")?;
            sh.vis.edit_model(i.segment(3), |m| m.line_width = v)?;
            done()
        },
    );
    let key_help = if by_particle { "particle name" } else { "charge: 1, -1 or 0" };
    s.add_command(
        &format!("{base}/set"),
        &format!("Colour for a {key_help}, by name or r g b [a]."),
        with(vec![req("key", Str)], colour_params("white")),
        set_model_colour,
    );
    s.add_command(
        &format!("{base}/setRGBA"),
        &format!("Colour for a {key_help} as r g b a."),
        vec![req("key", Str), req("red", Double), req("green", Double), req("blue", Double), opt("alpha", Double, "1")],
        |sh, i| {
            let a = &i.args;
            let c = Colour::new(a.f64("red"), a.f64("green"), a.f64("blue"), a.f64("alpha"));
            let key = a.str("key").to_string();
            if !sh.vis.edit_model(i.segment(3), |m| m.set_colour(&key, c))? {
                return Err(ShellError::Invalid(format!("\"{key}\" is not a valid key for this model")));
            }
            done()
        },
    );
    if by_particle {
        s.add_command(
            &format!("{base}/setDefault"),
            "Colour for particles without their own colour.",
            colour_params("white"),
            |sh, i| {
                let c = colour(&i.args)?;
                sh.vis.edit_model(i.segment(3), |m| m.set_colour("default", c))?;
                done()
            },
        );
    }
}

fn set_model_colour(sh: &mut Shell, i: &Invocation) -> R {
    let c = colour(&i.args)?;
    let key = i.args.str("key").to_string();
    if !sh.vis.edit_model(i.segment(3), |m| m.set_colour(&key, c))? {
        return Err(ShellError::Invalid(format!("\"{key}\" is not a valid key for this model")));
    }
    done()
}

/// Commands under `/vis/filtering/trajectories/<name>/`.
fn add_filter_commands(s: &mut Shell, name: &str, attribute: bool) {
    let base = format!("/vis/filtering/trajectories/{name}");
    if attribute {
        s.add_command(
            &format!("{base}/setAttribute"),
            "Numeric trajectory attribute to test, e.g. IKE or Ch.",
            vec![req("key", Str)],
            |sh, i| {
                let key = i.args.str("key").to_string();
                sh.vis.edit_filter(i.segment(3), |f| {
                    if let crate::events::FilterKind::AttributeInterval { key: k, .. } = &mut f.kind {
                        *k = key;
                    }
                })?;
                done()
            },
        );
        s.add_command(
            &format!("{base}/setInterval"),
            "Accepted interval, in the attribute's internal units.",
            vec![req("min", Double), req("max", Double)],
            |sh, i| {
                let (lo, hi) = (i.args.f64("min"), i.args.f64("max"));
                if lo > hi {
                    return Err(ShellError::Invalid(format!("empty interval [{lo}, {hi}]")));
                }
                sh.vis.edit_filter(i.segment(3), |f| {
                    if let crate::events::FilterKind::AttributeInterval { min, max, .. } = &mut f.kind {
                        (*min, *max) = (lo, hi);
                    }
                })?;
                done()
            },
        );
    } else {
        s.add_command(
            &format!("{base}/add"),
            "Add an accepted particle name or charge.",
            vec![req("item", Str)],
            |sh, i| {
                let item = i.args.str("item").to_string();
                if !sh.vis.edit_filter(i.segment(3), |f| f.add(&item))? {
                    return Err(ShellError::Invalid(format!("cannot add \"{item}\" to this filter")));
                }
                done()
            },
        );
    }
    s.add_command(
        &format!("{base}/invert"),
        "Reject what the filter would accept.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.edit_filter(i.segment(3), |x| x.invert = f)?;
            done()
        },
    );
    s.add_command(
        &format!("{base}/active"),
        "Switch the filter on or off.",
        vec![opt("flag", Bool, "true")],
        |sh, i| {
            let f = i.args.bool("flag");
            sh.vis.edit_filter(i.segment(3), |x| x.active = f)?;
            done()
        },
    );
}

/// The vis attribute commands shared by `/vis/geometry/set/` and
/// `/vis/touchable/set/`: name, value parameters, and patch builder.
type PatchFn = fn(&Args) -> Result<VisPatch, ShellError>;

fn patch_commands() -> Vec<(&'static str, &'static str, Vec<Param>, PatchFn)> {
    vec![
        ("visibility", "Visibility.", vec![opt("visibility", Bool, "true")], |a| {
            Ok(VisPatch { visible: Some(a.bool("visibility")), ..Default::default() })
        }),
        ("colour", "Colour, by name or r g b [a].", colour_params("white"), |a| {
            Ok(VisPatch { colour: Some(colour(a)?), ..Default::default() })
        }),
        ("lineWidth", "Line width in pixels.", vec![opt("lineWidth", Double, "1")], |a| {
            Ok(VisPatch { line_width: Some(a.f64("lineWidth").max(0.0)), ..Default::default() })
        }),
        ("lineStyle", "Line style.", vec![opt("lineStyle", Choice(LINE_STYLES), "unbroken")], |a| {
            Ok(VisPatch { line_style: Some(line_style(a.str("lineStyle"))), ..Default::default() })
        }),
        ("forceWireframe", "Always draw as wireframe.", vec![opt("forceWireframe", Bool, "true")], |a| {
            let f = if a.bool("forceWireframe") { ForcedStyle::Wireframe } else { ForcedStyle::None };
            Ok(VisPatch { forced_style: Some(f), ..Default::default() })
        }),
        ("forceSolid", "Always draw as surfaces.", vec![opt("forceSolid", Bool, "true")], |a| {
            let f = if a.bool("forceSolid") { ForcedStyle::Surface } else { ForcedStyle::None };
            Ok(VisPatch { forced_style: Some(f), ..Default::default() })
        }),
        ("daughtersInvisible", "Hide the daughters.", vec![opt("daughtersInvisible", Bool, "true")], |a| {
            Ok(VisPatch { daughters_invisible: Some(a.bool("daughtersInvisible")), ..Default::default() })
        }),
    ]
}

fn patch_for(path: &str, a: &Args) -> Result<VisPatch, ShellError> {
    let leaf = path.rsplit('/').next().unwrap_or("");
    let (_, _, _, f) = patch_commands().into_iter().find(|(n, ..)| *n == leaf).expect("registered patch command");
    f(a)
}

fn geometry(s: &mut Shell) {
    for (name, guidance, params, _) in patch_commands() {
        s.add_command(
            &format!("/vis/geometry/set/{name}"),
            &format!("{guidance} Applies to a logical volume and, for depth > 0, its daughters that many levels down (negative: all)."),
            with(vec![req("logical-volume-name", Str), opt("depth", Int, "0")], params),
            |sh, i| {
                let patch = patch_for(&i.path, &i.args)?;
                let (lv, depth) = (i.args.str("logical-volume-name").to_string(), i.args.int("depth") as i32);
                let n = sh.vis.edit_geometry(|g| g.set_logical_vis(&lv, depth, &patch))?;
                if n == 0 {
                    return Ok(Outcome::Warning(format!("no logical volume \"{lv}\"; nothing changed")));
                }
                sh.vis.note(Verbosity::Confirmations, format!("{n} logical volume(s) changed"));
                done()
            },
        );
    }
}

fn touchable(s: &mut Shell) {
    for (name, guidance, params, _) in patch_commands() {
        s.add_command(
            &format!("/vis/touchable/set/{name}"),
            &format!("{guidance} Applies to the touchable chosen with /vis/set/touchable."),
            params,
            |sh, i| {
                let path = sh.touchable.clone().ok_or_else(no_touchable)?;
                let patch = patch_for(&i.path, &i.args)?;
                let n = sh.vis.edit_geometry(|g| g.set_touchable_vis(&path, &patch))?;
                if n == 0 {
                    return Ok(Outcome::Warning(format!(
                        "touchable {} not found; nothing changed",
                        crate::geometry::path_string(&path)
                    )));
                }
                done()
            },
        );
    }
    s.add_command("/vis/touchable/dump", "Print the attributes of the current touchable.", vec![], |sh, _| {
        let path = sh.touchable.clone().ok_or_else(no_touchable)?;
        let g = sh.vis.geometry();
        let t = g.resolve_path(&path).ok_or_else(|| {
            ShellError::Invalid(format!("touchable {} not found", crate::geometry::path_string(&path)))
        })?;
        let text: Vec<String> =
            g.touchable_attributes(&t).into_iter().map(|a| format!("{}: {}", a.key, a.value)).collect();
        sh.print(text.join("\n"));
        done()
    });
}

fn no_touchable() -> ShellError {
    ShellError::Invalid("no current touchable; use /vis/set/touchable".into())
}

fn set(s: &mut Shell) {
    s.add_command(
        "/vis/set/colour",
        "Default colour for decorations. No argument reverts to white.",
        colour_params("white"),
        |sh, i| {
            sh.vis.defaults.colour = colour(&i.args)?;
            done()
        },
    );
    s.add_command(
        "/vis/set/lineWidth",
        "Default line width for decorations. No argument reverts to 1.",
        vec![opt("width", Double, "1")],
        |sh, i| {
            sh.vis.defaults.line_width = positive(&i.args, "width")?;
            done()
        },
    );
    s.add_command(
        "/vis/set/textColour",
        "Default text colour. No argument reverts to blue.",
        colour_params("blue"),
        |sh, i| {
            sh.vis.defaults.text_colour = colour(&i.args)?;
            done()
        },
    );
    s.add_command(
        "/vis/set/textLayout",
        "Default text alignment. No argument reverts to left.",
        vec![opt("layout", Choice(LAYOUTS), "left")],
        |sh, i| {
            sh.vis.defaults.text_layout = layout(i.args.str("layout"));
            done()
        },
    );
    s.add_command(
        "/vis/set/touchable",
        "Choose the touchable for /vis/touchable commands as name copy pairs from the world down. No argument clears it.",
        vec![opt("list", Text, "")],
        |sh, i| {
            let list = i.args.str("list");
            if list.is_empty() {
                sh.touchable = None;
                return done();
            }
            let tokens: Vec<&str> = list.split_whitespace().collect();
            let mut path = Vec::new();
            let mut k = 0;
            while k < tokens.len() {
                let copy = tokens.get(k + 1).and_then(|c| c.parse::<i32>().ok());
                path.push(PathElement::new(tokens[k], copy.unwrap_or(0)));
                k += if copy.is_some() { 2 } else { 1 };
            }
            let exists = sh.vis.geometry().path_exists(&path);
            let shown = crate::geometry::path_string(&path);
            sh.touchable = Some(path);
            if exists {
                done()
            } else {
                Ok(Outcome::Warning(format!("touchable {shown} does not exist in the geometry")))
            }
        },
    );
}
