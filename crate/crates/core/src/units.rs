//! Internal unit system and human-readable formatting.
//!
//! Internal units: millimetre, radian, MeV, gram, tesla. A quantity in internal
//! units is converted for display by [`best_unit`], which picks the largest unit
//! of the category that keeps the mantissa at or above one.

use std::fmt::Write as _;

pub const MM: f64 = 1.0;
pub const CM: f64 = 10.0;
pub const M: f64 = 1000.0;
pub const KM: f64 = 1.0e6;
pub const UM: f64 = 1.0e-3;
pub const NM: f64 = 1.0e-6;

pub const MM3: f64 = 1.0;
pub const CM3: f64 = 1.0e3;
pub const M3: f64 = 1.0e9;

pub const RAD: f64 = 1.0;
pub const MRAD: f64 = 1.0e-3;
pub const DEG: f64 = std::f64::consts::PI / 180.0;

pub const EV: f64 = 1.0e-6;
pub const KEV: f64 = 1.0e-3;
pub const MEV: f64 = 1.0;
pub const GEV: f64 = 1.0e3;
pub const TEV: f64 = 1.0e6;

pub const MG: f64 = 1.0e-3;
pub const G: f64 = 1.0;
pub const KG: f64 = 1.0e3;

pub const G_PER_CM3: f64 = G / CM3;
pub const MG_PER_CM3: f64 = MG / CM3;

/// Physical dimension of a value, used for unit lookup and display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Length,
    Volume,
    Angle,
    Energy,
    Mass,
    Density,
}

impl Category {
    /// Display units, smallest to largest. Ties keep the earlier entry.
    pub fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Category::Length => &[("nm", NM), ("um", UM), ("mm", MM), ("cm", CM), ("m", M), ("km", KM)],
            Category::Volume => &[("mm3", MM3), ("cm3", CM3), ("m3", M3)],
            Category::Angle => &[("mrad", MRAD), ("deg", DEG), ("rad", RAD)],
            Category::Energy => &[("eV", EV), ("keV", KEV), ("MeV", MEV), ("GeV", GEV), ("TeV", TEV)],
            Category::Mass => &[("mg", MG), ("g", G), ("kg", KG)],
            Category::Density => &[("mg/cm3", MG_PER_CM3), ("g/cm3", G_PER_CM3)],
        }
    }

    /// Unit accepted on input (commands, files). Includes a few spelled-out aliases.
    pub fn parse_unit(self, symbol: &str) -> Option<f64> {
        let alias = match (self, symbol) {
            (Category::Length, "millimeter" | "millimetre") => Some(MM),
            (Category::Length, "centimeter" | "centimetre") => Some(CM),
            (Category::Length, "meter" | "metre") => Some(M),
            (Category::Angle, "degree" | "degrees") => Some(DEG),
            (Category::Angle, "radian" | "radians") => Some(RAD),
            _ => None,
        };
        alias.or_else(|| self.units().iter().find(|(s, _)| *s == symbol).map(|(_, v)| *v))
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Length => "length",
            Category::Volume => "volume",
            Category::Angle => "angle",
            Category::Energy => "energy",
            Category::Mass => "mass",
            Category::Density => "density",
        }
    }
}

/// Index of the display unit for `magnitude` in `category`.
fn best_index(magnitude: f64, category: Category) -> usize {
    let units = category.units();
    let mut best: Option<(usize, f64)> = None;
    let mut below: Option<(usize, f64)> = None;
    for (i, (_, u)) in units.iter().enumerate() {
        let ratio = magnitude / u;
        if ratio >= 1.0 {
            if best.is_none_or(|(_, r)| ratio < r) {
                best = Some((i, ratio));
            }
        } else if below.is_none_or(|(_, r)| ratio > r) {
            below = Some((i, ratio));
        }
    }
    if magnitude == 0.0 {
        return units.iter().position(|(_, u)| *u == 1.0).unwrap_or(0);
    }
    best.or(below).map(|(i, _)| i).unwrap_or(0)
}

/// Formats an internal-unit value with its best display unit, e.g. `"1.85 g/cm3"`.
pub fn best_unit(value: f64, category: Category) -> String {
    let (symbol, unit) = category.units()[best_index(value.abs(), category)];
    format!("{} {}", format_g(value / unit, 6), symbol)
}

/// Formats a 3-vector with one best unit chosen from its largest component.
pub fn best_unit_vec(v: [f64; 3], category: Category) -> String {
    let m = v.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let (symbol, unit) = category.units()[best_index(m, category)];
    format!("({}, {}, {}) {}", format_g(v[0] / unit, 6), format_g(v[1] / unit, 6), format_g(v[2] / unit, 6), symbol)
}

/// C-style `%g` formatting with `precision` significant digits.
pub fn format_g(value: f64, precision: usize) -> String {
    let precision = precision.max(1);
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return if value.is_nan() {
            "nan".into()
        } else if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Exponent after rounding to `precision` significant digits.
    let sci = format!("{:.*e}", precision - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= precision as i32 {
        let mantissa = strip_zeros(mantissa);
        let mut out = String::new();
        let _ = write!(out, "{}e{}{:02}", mantissa, if exp < 0 { '-' } else { '+' }, exp.abs());
        out
    } else {
        let decimals = (precision as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, value)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_g_matches_c_printf() {
        // Reference strings produced by printf("%g").
        let cases = [
            (20736.0, "20736"),
            (10888.071, "10888.1"),
            (1.7316, "1.7316"),
            (175.92918860102841, "175.929"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (100.0, "100"),
            (999999.5, "1e+06"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g(v, 6), want, "{v}");
        }
    }

    #[test]
    fn best_unit_picks_largest_unit_with_mantissa_at_least_one() {
        assert_eq!(best_unit(20736.0 * CM3, Category::Volume), "20736 cm3");
        assert_eq!(best_unit(10.525 * G, Category::Mass), "10.525 g");
        assert_eq!(best_unit(12828.5 * G, Category::Mass), "12.8285 kg");
        assert_eq!(best_unit(1.20479 * MG_PER_CM3, Category::Density), "1.20479 mg/cm3");
        assert_eq!(best_unit(1.85 * G_PER_CM3, Category::Density), "1.85 g/cm3");
        assert_eq!(best_unit(0.3 * MEV, Category::Energy), "300 keV");
        assert_eq!(best_unit(0.0, Category::Length), "0 mm");
        assert_eq!(best_unit(5.0e-7, Category::Length), "0.5 nm");
    }

    #[test]
    fn unit_parsing_is_category_aware() {
        assert_eq!(Category::Length.parse_unit("cm"), Some(CM));
        assert_eq!(Category::Length.parse_unit("deg"), None);
        assert!((Category::Angle.parse_unit("deg").unwrap() * 90.0 - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
