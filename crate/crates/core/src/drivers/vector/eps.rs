use std::fmt::Write as _;

use crate::colour::Colour;
use crate::geometry::LineStyle;
use crate::scene::{MarkerKind, TextLayout};

use super::{num, PaintedScene, Shape2};

const PROLOGUE: &str = "\
/L { 4 2 roll moveto lineto stroke } bind def
/C { setrgbcolor } bind def
/W { setlinewidth } bind def
/R { 4 2 roll moveto 1 index 0 rlineto 0 exch rlineto neg 0 rlineto closepath fill } bind def
/D { 0 360 arc closepath fill } bind def
";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '(' | ')' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            c if c.is_ascii() => out.push(c),
            _ => out.push('?'),
        }
    }
    out
}

/// PostScript has no alpha, so translucent colours are premixed with the background.
fn opaque(c: Colour, bg: Colour) -> Colour {
    if c.a >= 1.0 {
        c
    } else {
        bg.lerp(&Colour::rgb(c.r, c.g, c.b), c.a)
    }
}

/// Serialises a painted scene as Encapsulated PostScript. Line widths in
/// points equal the pixel widths; the bounding box hugs the drawn content.
pub fn to_eps(scene: &PaintedScene) -> String {
    let h = scene.height as f64;
    let y = |v: f64| h - v;
    let (x0, y0, x1, y1) = scene.bounds();
    let mut out = String::new();
    out.push_str("%!PS-Adobe-3.0 EPSF-3.0\n");
    writeln!(
        out,
        "%%BoundingBox: {} {} {} {}",
        x0.floor() as i64,
        y(y1).floor() as i64,
        x1.ceil() as i64,
        y(y0).ceil() as i64
    )
    .unwrap();
    out.push_str("%%Creator: multivis\n%%Pages: 1\n%%EndComments\n");
    out.push_str(PROLOGUE);
    let bg = scene.background;
    writeln!(out, "{} {} {} C", num(bg.r), num(bg.g), num(bg.b)).unwrap();
    writeln!(out, "{} {} {} {} R", num(x0), num(y(y1)), num(x1 - x0), num(y1 - y0)).unwrap();
    for it in &scene.items {
        let c = opaque(scene.ink(it.colour), bg);
        writeln!(out, "{} {} {} C {} W", num(c.r), num(c.g), num(c.b), num(it.line_width)).unwrap();
        let dashed = it.line_style != LineStyle::Solid;
        if dashed {
            out.push_str(if it.line_style == LineStyle::Dashed { "[6 4] 0 setdash\n" } else { "[1 3] 0 setdash\n" });
        }
        match &it.shape {
            Shape2::Line { a, b } => {
                writeln!(out, "{} {} {} {} L", num(a.0), num(y(a.1)), num(b.0), num(y(b.1))).unwrap();
            }
            Shape2::Polyline { points } | Shape2::Polygon { points } => {
                for (i, p) in points.iter().enumerate() {
                    let op = if i == 0 { "moveto" } else { "lineto" };
                    writeln!(out, "{} {} {op}", num(p.0), num(y(p.1))).unwrap();
                }
                let end = if matches!(it.shape, Shape2::Polygon { .. }) { "closepath fill" } else { "stroke" };
                if points.len() == 1 {
                    out.push_str("newpath\n");
                } else {
                    writeln!(out, "{end}").unwrap();
                }
            }
            Shape2::Marker { at, kind, size } => match kind {
                MarkerKind::Square => writeln!(
                    out,
                    "{} {} {} {} R",
                    num(at.0 - size / 2.0),
                    num(y(at.1) - size / 2.0),
                    num(*size),
                    num(*size)
                )
                .unwrap(),
                MarkerKind::Circle | MarkerKind::Dot => {
                    let r = if *kind == MarkerKind::Dot { 1.0 } else { size / 2.0 };
                    writeln!(out, "newpath {} {} {} D", num(at.0), num(y(at.1)), num(r)).unwrap();
                }
            },
            Shape2::Text { at, content, size, layout } => {
                writeln!(out, "/Helvetica findfont {} scalefont setfont", num(*size)).unwrap();
                let shift = match layout {
                    TextLayout::Left => "",
                    TextLayout::Centre => " dup stringwidth pop 2 div neg 0 rmoveto",
                    TextLayout::Right => " dup stringwidth pop neg 0 rmoveto",
                };
                writeln!(out, "{} {} moveto ({}){shift} show", num(at.0), num(y(at.1)), escape(content)).unwrap();
            }
        }
        if dashed {
            out.push_str("[] 0 setdash\n");
        }
    }
    out.push_str("showpage\n%%EOF\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_parentheses() {
        assert_eq!(escape("a(b)\\"), "a\\(b\\)\\\\");
    }
}
