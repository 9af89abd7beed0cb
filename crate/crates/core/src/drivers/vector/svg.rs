use std::fmt::Write as _;

use crate::colour::Colour;
use crate::geometry::LineStyle;
use crate::scene::{MarkerKind, TextLayout};

use super::{num, PaintedScene, Shape2};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn points(ps: &[(f64, f64)]) -> String {
    ps.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect::<Vec<_>>().join(" ")
}

fn stroke(c: Colour, width: f64, style: LineStyle) -> String {
    let mut s = format!("stroke=\"{}\" stroke-width=\"{}\"", c.to_hex(), num(width));
    if c.a < 1.0 {
        write!(s, " stroke-opacity=\"{}\"", num(c.a)).unwrap();
    }
    match style {
        LineStyle::Solid => {}
        LineStyle::Dashed => s.push_str(" stroke-dasharray=\"6,4\""),
        LineStyle::Dotted => s.push_str(" stroke-dasharray=\"1,3\""),
    }
    s
}

fn fill(c: Colour) -> String {
    if c.a < 1.0 {
        format!("fill=\"{}\" fill-opacity=\"{}\"", c.to_hex(), num(c.a))
    } else {
        format!("fill=\"{}\"", c.to_hex())
    }
}

/// Serialises a painted scene as a standalone SVG document.
pub fn to_svg(scene: &PaintedScene) -> String {
    let (w, h) = (scene.width, scene.height);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">")
        .unwrap();
    writeln!(
        out,
        "<rect class=\"background\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" {}/>",
        fill(scene.background)
    )
    .unwrap();
    for it in &scene.items {
        let c = scene.ink(it.colour);
        let class = it.class;
        match &it.shape {
            Shape2::Line { a, b } => writeln!(
                out,
                "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>",
                num(a.0),
                num(a.1),
                num(b.0),
                num(b.1),
                stroke(c, it.line_width, it.line_style)
            ),
            Shape2::Polyline { points: ps } => writeln!(
                out,
                "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" {}/>",
                points(ps),
                stroke(c, it.line_width, it.line_style)
            ),
            Shape2::Polygon { points: ps } => {
                writeln!(out, "<polygon class=\"{class}\" points=\"{}\" {} stroke=\"none\"/>", points(ps), fill(c))
            }
            Shape2::Marker { at, kind, size } => match kind {
                MarkerKind::Square => writeln!(
                    out,
                    "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {}/>",
                    num(at.0 - size / 2.0),
                    num(at.1 - size / 2.0),
                    num(*size),
                    num(*size),
                    fill(c)
                ),
                MarkerKind::Circle | MarkerKind::Dot => {
                    let r = if *kind == MarkerKind::Dot { 1.0 } else { size / 2.0 };
                    writeln!(
                        out,
                        "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
                        num(at.0),
                        num(at.1),
                        num(r),
                        fill(c)
                    )
                }
            },
            Shape2::Text { at, content, size, layout } => {
                let anchor = match layout {
                    TextLayout::Left => "start",
                    TextLayout::Centre => "middle",
                    TextLayout::Right => "end",
                };
                writeln!(
                    out,
                    "<text class=\"{class}\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"{anchor}\" {}>{}</text>",
                    num(at.0),
                    num(at.1),
                    num(*size),
                    fill(c),
                    escape(content)
                )
            }
        }
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
