//! Line-delimited JSON event files: one event object per line. The schema is
//! documented in `docs/event-format.md`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::att::AttValue;
use crate::Vec3;

use super::{Event, EventsError, Hit, StepPoint, Trajectory};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    event_id: i32,
    trajectories: Vec<TrajectoryRecord>,
    #[serde(default)]
    hits: Vec<HitRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryRecord {
    id: i32,
    pdg: i32,
    name: String,
    charge: f64,
    ike_mev: f64,
    imom_mev: [f64; 3],
    points: Vec<[f64; 4]>,
    #[serde(default)]
    parent_id: i32,
    #[serde(default)]
    creator_process: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HitRecord {
    position_mm: [f64; 3],
    edep_mev: f64,
    #[serde(default)]
    detector: String,
    #[serde(default)]
    attributes: BTreeMap<String, String>,
}

impl From<&Event> for EventRecord {
    fn from(e: &Event) -> Self {
        EventRecord {
            event_id: e.event_id,
            trajectories: e
                .trajectories
                .iter()
                .map(|t| TrajectoryRecord {
                    id: t.track_id,
                    pdg: t.pdg_encoding,
                    name: t.particle_name.clone(),
                    charge: t.charge,
                    ike_mev: t.initial_kinetic_energy,
                    imom_mev: t.initial_momentum.to_f64(),
                    points: t
                        .points
                        .iter()
                        .map(|p| [p.position.x, p.position.y, p.position.z, p.energy_deposit])
                        .collect(),
                    parent_id: t.parent_id,
                    creator_process: t.creator_process.clone(),
                })
                .collect(),
            hits: e
                .hits
                .iter()
                .map(|h| HitRecord {
                    position_mm: h.position.to_f64(),
                    edep_mev: h.energy_deposit,
                    detector: h.detector_name.clone(),
                    attributes: h.extra.iter().map(|a| (a.key.clone(), a.value.clone())).collect(),
                })
                .collect(),
        }
    }
}

impl EventRecord {
    fn into_event(self) -> Result<Event, String> {
        let trajectories = self
            .trajectories
            .into_iter()
            .map(|t| {
                if t.points.is_empty() {
                    return Err(format!("trajectory {} has no points", t.id));
                }
                Ok(Trajectory {
                    track_id: t.id,
                    parent_id: t.parent_id,
                    particle_name: t.name,
                    pdg_encoding: t.pdg,
                    charge: t.charge,
                    initial_kinetic_energy: t.ike_mev,
                    initial_momentum: Vec3::from_f64(t.imom_mev),
                    points: t
                        .points
                        .into_iter()
                        .map(|[x, y, z, e]| StepPoint { position: Vec3::new(x, y, z), energy_deposit: e })
                        .collect(),
                    creator_process: t.creator_process,
                })
            })
            .collect::<Result<_, _>>()?;
        let hits = self
            .hits
            .into_iter()
            .map(|h| {
                if !(h.edep_mev >= 0.0) {
                    return Err(format!("hit energy deposit {} is negative", h.edep_mev));
                }
                Ok(Hit {
                    position: Vec3::from_f64(h.position_mm),
                    energy_deposit: h.edep_mev,
                    detector_name: h.detector,
                    extra: h.attributes.into_iter().map(|(k, v)| AttValue::new(k, v)).collect(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Event { event_id: self.event_id, trajectories, hits })
    }
}

/// Serialises one event as a single JSON line (no trailing newline).
pub fn event_to_line(e: &Event) -> String {
    serde_json::to_string(&EventRecord::from(e)).expect("event records always serialise")
}

/// Parses every non-blank line. `source` names the input in error messages.
pub fn parse_events(text: &str, source: &str) -> Result<Vec<Event>, EventsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EventsError::Parse { path: source.to_string(), line: i + 1, message };
        let record: EventRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        out.push(record.into_event().map_err(err)?);
    }
    Ok(out)
}

pub fn read_events(path: &Path) -> Result<Vec<Event>, EventsError> {
    let text = std::fs::read_to_string(path)?;
    parse_events(&text, &path.display().to_string())
}

pub fn write_events<'a>(path: &Path, events: impl IntoIterator<Item = &'a Event>) -> Result<(), EventsError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for e in events {
        writeln!(f, "{}", event_to_line(e))?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{generate_toy_event, EventStore, ToyConfig};
    use super::*;

    #[test]
    fn empty_input() {
        assert!(parse_events("", "x").unwrap().is_empty());
        assert!(parse_events("\n  \n", "x").unwrap().is_empty());
    }

    #[test]
    fn store_round_trip() {
        let mut store = EventStore::new(5);
        for i in 0..7 {
            store.push(generate_toy_event(i, i as u64, 4, 1.0, &ToyConfig::default()));
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ev.jsonl");
        write_events(&path, store.iter()).unwrap();
        let mut back = EventStore::new(5);
        read_events(&path).unwrap().into_iter().for_each(|e| back.push(e));
        assert_eq!(back, store);
    }

    #[test]
    fn missing_name_reports_line() {
        let good = event_to_line(&generate_toy_event(0, 1, 1, 0.0, &ToyConfig::default()));
        let bad = good.replacen("\"name\":", "\"nom\":", 1);
        let text = format!("{good}\n{bad}\n");
        let e = parse_events(&text, "events.jsonl").unwrap_err();
        let msg = e.to_string();
        assert!(msg.starts_with("events.jsonl:2:"), "{msg}");
        assert!(msg.contains("name"), "{msg}");
    }
}
