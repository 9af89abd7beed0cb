use crate::att::{AttDef, AttDefSet, AttKind, AttValue};
use crate::units::{best_unit, best_unit_vec, format_g, Category};

use super::{Hit, Trajectory};

/// Attribute schema for trajectories, including the owning event's id.
pub fn trajectory_att_defs() -> AttDefSet {
    use AttKind::*;
    AttDefSet::new(
        "Trajectory",
        vec![
            AttDef::new("EventID", "Event ID", Int, false),
            AttDef::new("CPN", "Creator Process Name", Text, false),
            AttDef::new("Ch", "Charge", Double, true),
            AttDef::new("ID", "Track ID", Int, false),
            AttDef::new("IKE", "Initial kinetic energy", Double, true),
            AttDef::new("IMag", "Initial momentum magnitude", Double, true),
            AttDef::new("IMom", "Initial momentum", Vector, true),
            AttDef::new("NTP", "No. of points", Int, false),
            AttDef::new("PDG", "PDG Encoding", Int, false),
            AttDef::new("PID", "Parent ID", Int, false),
            AttDef::new("PN", "Particle Name", Text, false),
        ],
    )
}

pub fn trajectory_attributes(t: &Trajectory, event_id: i32) -> Vec<AttValue> {
    vec![
        AttValue::new("EventID", event_id.to_string()),
        AttValue::new("CPN", t.creator_process.clone()),
        AttValue::new("Ch", format!("{} e+", format_g(t.charge, 6))),
        AttValue::new("ID", t.track_id.to_string()),
        AttValue::new("IKE", best_unit(t.initial_kinetic_energy, Category::Energy)),
        AttValue::new("IMag", best_unit(t.initial_momentum_magnitude(), Category::Energy)),
        AttValue::new("IMom", best_unit_vec(t.initial_momentum.to_f64(), Category::Energy)),
        AttValue::new("NTP", t.points.len().to_string()),
        AttValue::new("PDG", t.pdg_encoding.to_string()),
        AttValue::new("PID", t.parent_id.to_string()),
        AttValue::new("PN", t.particle_name.clone()),
    ]
}

impl Trajectory {
    /// Numeric value of an attribute in internal units, for interval filtering.
    pub fn numeric_attribute(&self, key: &str) -> Option<f64> {
        Some(match key {
            "Ch" => self.charge,
            "ID" => self.track_id as f64,
            "IKE" => self.initial_kinetic_energy,
            "IMag" => self.initial_momentum_magnitude(),
            "NTP" => self.points.len() as f64,
            "PDG" => self.pdg_encoding as f64,
            "PID" => self.parent_id as f64,
            _ => return None,
        })
    }
}

/// Attribute schema for hits. Extra keys carried by hits are appended.
pub fn hit_att_defs<'a>(extra_keys: impl IntoIterator<Item = &'a str>) -> AttDefSet {
    let mut defs = vec![
        AttDef::new("EventID", "Event ID", AttKind::Int, false),
        AttDef::new("Det", "Detector Name", AttKind::Text, false),
        AttDef::new("Edep", "Energy Deposit", AttKind::Double, true),
        AttDef::new("Pos", "Position", AttKind::Vector, true),
    ];
    for k in extra_keys {
        if !defs.iter().any(|d| d.key == k) {
            defs.push(AttDef::new(k, k, AttKind::Text, false));
        }
    }
    AttDefSet::new("Hit", defs)
}

pub fn hit_attributes(h: &Hit, event_id: i32) -> Vec<AttValue> {
    let mut v = vec![
        AttValue::new("EventID", event_id.to_string()),
        AttValue::new("Det", h.detector_name.clone()),
        AttValue::new("Edep", best_unit(h.energy_deposit, Category::Energy)),
        AttValue::new("Pos", best_unit_vec(h.position.to_f64(), Category::Length)),
    ];
    v.extend(h.extra.iter().cloned());
    v
}

#[cfg(test)]
mod tests {
    use super::super::{generate_toy_event, ToyConfig};
    use super::*;
    use crate::att::find;

    #[test]
    fn toy_attributes() {
        let e = generate_toy_event(3, 11, 40, 1.0, &ToyConfig::default());
        let defs = trajectory_att_defs();
        let electron = e.trajectories.iter().find(|t| t.particle_name == "e-").expect("an electron in 40 tracks");
        let v = trajectory_attributes(electron, 3);
        defs.validate(&v).unwrap();
        assert_eq!(find(&v, "PN"), Some("e-"));
        assert_eq!(find(&v, "Ch"), Some("-1 e+"));
        assert_eq!(find(&v, "NTP"), Some(electron.points.len().to_string().as_str()));
        assert!(find(&v, "IKE").unwrap().ends_with("eV"));
        for h in &e.hits {
            hit_att_defs([]).validate(&hit_attributes(h, 3)).unwrap();
        }
    }
}
