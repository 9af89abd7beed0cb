use std::fmt;

use serde::{Deserialize, Serialize};

/// RGBA colour with components in `[0, 1]`. Alpha below one means transparent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Colour {
    pub r: f64,
    pub g: f64,
    pub b: f64,
    pub a: f64,
}

impl Default for Colour {
    fn default() -> Self {
        Self::WHITE
    }
}

fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

impl Colour {
    pub const WHITE: Colour = Colour::rgb(1.0, 1.0, 1.0);
    pub const BLACK: Colour = Colour::rgb(0.0, 0.0, 0.0);
    pub const RED: Colour = Colour::rgb(1.0, 0.0, 0.0);
    pub const GREEN: Colour = Colour::rgb(0.0, 1.0, 0.0);
    pub const BLUE: Colour = Colour::rgb(0.0, 0.0, 1.0);
    pub const CYAN: Colour = Colour::rgb(0.0, 1.0, 1.0);
    pub const MAGENTA: Colour = Colour::rgb(1.0, 0.0, 1.0);
    pub const YELLOW: Colour = Colour::rgb(1.0, 1.0, 0.0);
    pub const GREY: Colour = Colour::rgb(0.5, 0.5, 0.5);

    pub const fn rgb(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b, a: 1.0 }
    }

    /// Builds a colour, clamping every component into `[0, 1]`.
    pub fn new(r: f64, g: f64, b: f64, a: f64) -> Self {
        Self { r: clamp01(r), g: clamp01(g), b: clamp01(b), a: clamp01(a) }
    }

    pub fn named(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "white" => Self::WHITE,
            "black" => Self::BLACK,
            "red" => Self::RED,
            "green" => Self::GREEN,
            "blue" => Self::BLUE,
            "cyan" => Self::CYAN,
            "magenta" => Self::MAGENTA,
            "yellow" => Self::YELLOW,
            "gray" | "grey" => Self::GREY,
            "brown" => Self::rgb(0.45, 0.25, 0.0),
            _ => return None,
        })
    }

    pub fn is_opaque(&self) -> bool {
        self.a >= 1.0
    }

    /// Multiplies the RGB components by `k`, keeping alpha.
    pub fn shaded(&self, k: f64) -> Self {
        Self::new(self.r * k, self.g * k, self.b * k, self.a)
    }

    pub fn lerp(&self, o: &Self, t: f64) -> Self {
        Self::new(
            self.r + (o.r - self.r) * t,
            self.g + (o.g - self.g) * t,
            self.b + (o.b - self.b) * t,
            self.a + (o.a - self.a) * t,
        )
    }

    pub fn to_rgb8(&self) -> [u8; 3] {
        let q = |v: f64| (clamp01(v) * 255.0).round() as u8;
        [q(self.r), q(self.g), q(self.b)]
    }

    /// `#rrggbb`, alpha omitted.
    pub fn to_hex(&self) -> String {
        let [r, g, b] = self.to_rgb8();
        format!("#{r:02x}{g:02x}{b:02x}")
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.r, self.g, self.b, self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_and_names() {
        let c = Colour::new(1.5, -0.2, 0.5, 2.0);
        assert_eq!(c, Colour { r: 1.0, g: 0.0, b: 0.5, a: 1.0 });
        assert_eq!(Colour::named("Grey"), Colour::named("gray"));
        assert_eq!(Colour::named("chartreuse"), None);
        assert_eq!(Colour::RED.to_hex(), "#ff0000");
    }
}
