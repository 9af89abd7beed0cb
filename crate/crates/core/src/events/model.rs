use std::collections::BTreeMap;

use crate::colour::Colour;

use super::Trajectory;

/// How one trajectory is drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrawStyle {
    pub colour: Colour,
    pub draw_line: bool,
    pub draw_points: bool,
    /// Pixels.
    pub point_size: f64,
    pub line_width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    ByCharge { positive: Colour, negative: Colour, neutral: Colour },
    ByParticleId { colours: BTreeMap<String, Colour>, default: Colour },
}

/// A styling rule for trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryModel {
    pub name: String,
    pub kind: ModelKind,
    pub draw_line: bool,
    pub draw_step_points: bool,
    pub step_point_size: f64,
    pub line_width: f64,
}

impl TrajectoryModel {
    fn with_kind(name: impl Into<String>, kind: ModelKind) -> Self {
        Self {
            name: name.into(),
            kind,
            draw_line: true,
            draw_step_points: false,
            step_point_size: 2.0,
            line_width: 1.0,
        }
    }

    /// Positive blue, negative red, neutral green.
    pub fn by_charge(name: impl Into<String>) -> Self {
        Self::with_kind(
            name,
            ModelKind::ByCharge { positive: Colour::BLUE, negative: Colour::RED, neutral: Colour::GREEN },
        )
    }

    pub fn by_particle_id(name: impl Into<String>) -> Self {
        Self::with_kind(name, ModelKind::ByParticleId { colours: BTreeMap::new(), default: Colour::WHITE })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::ByCharge { .. } => "drawByCharge",
            ModelKind::ByParticleId { .. } => "drawByParticleID",
        }
    }

    pub fn style(&self, t: &Trajectory) -> DrawStyle {
        let colour = match &self.kind {
            ModelKind::ByCharge { positive, negative, neutral } => {
                if t.charge > 0.0 {
                    *positive
                } else if t.charge < 0.0 {
                    *negative
                } else {
                    *neutral
                }
            }
            ModelKind::ByParticleId { colours, default } => *colours.get(&t.particle_name).unwrap_or(default),
        };
        DrawStyle {
            colour,
            draw_line: self.draw_line,
            draw_points: self.draw_step_points,
            point_size: self.step_point_size,
            line_width: self.line_width,
        }
    }

    /// Sets a colour by key: `1`/`-1`/`0` (or `+`/`-`/`0`) for charge models,
    /// a particle name or `default` for particle models.
    pub fn set_colour(&mut self, key: &str, colour: Colour) -> bool {
        match &mut self.kind {
            ModelKind::ByCharge { positive, negative, neutral } => {
                let slot = match key {
                    "1" | "+1" | "+" => positive,
                    "-1" | "-" => negative,
                    "0" => neutral,
                    _ => return false,
                };
                *slot = colour;
                true
            }
            ModelKind::ByParticleId { colours, default } => {
                if key == "default" {
                    *default = colour;
                } else {
                    colours.insert(key.to_string(), colour);
                }
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate_toy_event, ToyConfig};
    use super::*;

    #[test]
    fn charge_and_particle_styles() {
        let e = generate_toy_event(0, 5, 50, 1.0, &ToyConfig::default());
        let m = TrajectoryModel::by_charge("drawByCharge-0");
        for t in &e.trajectories {
            let want = match t.particle_name.as_str() {
                "e-" | "mu-" => Colour::RED,
                "e+" | "proton" => Colour::BLUE,
                _ => Colour::GREEN,
            };
            assert_eq!(m.style(t).colour, want);
        }
        let mut p = TrajectoryModel::by_particle_id("drawByParticleID-0");
        p.set_colour("gamma", Colour::GREEN);
        p.set_colour("default", Colour::YELLOW);
        let proton = e.trajectories.iter().find(|t| t.particle_name == "proton").unwrap();
        assert_eq!(p.style(proton).colour, Colour::YELLOW);
    }

    #[test]
    fn step_points() {
        let e = generate_toy_event(0, 5, 1, 1.0, &ToyConfig::default());
        let mut m = TrajectoryModel::by_charge("m");
        m.draw_step_points = true;
        m.step_point_size = 2.0;
        let s = m.style(&e.trajectories[0]);
        assert!(s.draw_points && s.draw_line);
        assert_eq!(s.point_size, 2.0);
    }
}
