use serde::{Deserialize, Serialize};

use crate::colour::Colour;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineStyle {
    #[default]
    Solid,
    Dashed,
    Dotted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcedStyle {
    #[default]
    None,
    Wireframe,
    Surface,
}

/// Drawing properties of a volume, trajectory or primitive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisAttributes {
    pub visible: bool,
    pub colour: Colour,
    pub line_width: f64,
    pub line_style: LineStyle,
    pub forced_style: ForcedStyle,
    pub daughters_invisible: bool,
}

impl Default for VisAttributes {
    fn default() -> Self {
        Self {
            visible: true,
            colour: Colour::WHITE,
            line_width: 1.0,
            line_style: LineStyle::Solid,
            forced_style: ForcedStyle::None,
            daughters_invisible: false,
        }
    }
}

impl VisAttributes {
    pub fn with_colour(colour: Colour) -> Self {
        Self { colour, ..Self::default() }
    }
}

/// Partial attributes; unset fields leave the target untouched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VisPatch {
    pub visible: Option<bool>,
    pub colour: Option<Colour>,
    pub line_width: Option<f64>,
    pub line_style: Option<LineStyle>,
    pub forced_style: Option<ForcedStyle>,
    pub daughters_invisible: Option<bool>,
}

impl VisPatch {
    pub fn apply_to(&self, v: &mut VisAttributes) {
        if let Some(x) = self.visible {
            v.visible = x;
        }
        if let Some(x) = self.colour {
            v.colour = x;
        }
        if let Some(x) = self.line_width {
            v.line_width = x.max(0.0);
        }
        if let Some(x) = self.line_style {
            v.line_style = x;
        }
        if let Some(x) = self.forced_style {
            v.forced_style = x;
        }
        if let Some(x) = self.daughters_invisible {
            v.daughters_invisible = x;
        }
    }

    /// Overlays `other` on `self`; fields set in `other` win.
    pub fn merge(&mut self, other: &VisPatch) {
        self.visible = other.visible.or(self.visible);
        self.colour = other.colour.or(self.colour);
        self.line_width = other.line_width.or(self.line_width);
        self.line_style = other.line_style.or(self.line_style);
        self.forced_style = other.forced_style.or(self.forced_style);
        self.daughters_invisible = other.daughters_invisible.or(self.daughters_invisible);
    }

    pub fn is_empty(&self) -> bool {
        *self == VisPatch::default()
    }
}
