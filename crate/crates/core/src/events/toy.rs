//! Deterministic stand-in for a simulation: straight neutrals and helical
//! charged tracks in a uniform field along +z.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Aabb, Vec3};

use super::{Event, Hit, StepPoint, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleType {
    pub name: &'static str,
    pub pdg: i32,
    pub charge: f64,
    /// MeV.
    pub mass: f64,
}

pub const PARTICLE_TABLE: [ParticleType; 5] = [
    ParticleType { name: "e-", pdg: 11, charge: -1.0, mass: 0.510_998_95 },
    ParticleType { name: "e+", pdg: -11, charge: 1.0, mass: 0.510_998_95 },
    ParticleType { name: "gamma", pdg: 22, charge: 0.0, mass: 0.0 },
    ParticleType { name: "mu-", pdg: 13, charge: -1.0, mass: 105.658_375_5 },
    ParticleType { name: "proton", pdg: 2212, charge: 1.0, mass: 938.272_088_16 },
];

#[derive(Clone, Debug, PartialEq)]
pub struct ToyConfig {
    /// Tracks are clipped to this box.
    pub world: Aabb,
    /// Tracks start here.
    pub origin: Vec3,
    /// Path length between successive points, mm.
    pub step: f64,
    pub max_points: usize,
    /// Kinetic energies are drawn log-uniformly from this range, MeV.
    pub energy_range: (f64, f64),
    /// Deposit per step for a unit-charge track, MeV.
    pub deposit_per_step: f64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            world: Aabb::symmetric(Vec3::new(1000.0, 1000.0, 1000.0)),
            origin: Vec3::zero(),
            step: 10.0,
            max_points: 2000,
            energy_range: (1.0, 1000.0),
            deposit_per_step: 0.2,
        }
    }
}

impl ToyConfig {
    pub fn with_world(world: Aabb) -> Self {
        Self { world, ..Self::default() }
    }
}

/// Point at path length `s` along a track starting at `origin` with unit
/// direction `dir`, charge `charge` and momentum `p` (MeV) in a field of
/// `field_tesla` along +z.
pub fn helix_point(origin: Vec3, dir: Vec3, charge: f64, p: f64, field_tesla: f64, s: f64) -> Vec3 {
    let sin_theta = dir.x.hypot(dir.y);
    if charge == 0.0 || field_tesla == 0.0 || sin_theta == 0.0 {
        return origin + dir * s;
    }
    let pt = p * sin_theta;
    // Radius in mm for pT in MeV and B in tesla.
    let radius = pt / (0.3 * charge.abs() * field_tesla);
    let k = charge.signum() * field_tesla.signum();
    let a0 = dir.y.atan2(dir.x);
    let a = a0 - k * s * sin_theta / radius;
    Vec3::new(
        origin.x - radius / k * (a.sin() - a0.sin()),
        origin.y + radius / k * (a.cos() - a0.cos()),
        origin.z + s * dir.z,
    )
}

fn inside(b: &Aabb, p: Vec3) -> bool {
    p.x >= b.min.x && p.x <= b.max.x && p.y >= b.min.y && p.y <= b.max.y && p.z >= b.min.z && p.z <= b.max.z
}

/// Generates one event. Equal arguments give equal events.
pub fn generate_toy_event(event_id: i32, seed: u64, n_tracks: usize, field_tesla: f64, cfg: &ToyConfig) -> Event {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trajectories = Vec::with_capacity(n_tracks);
    let mut hits = Vec::new();
    for i in 0..n_tracks {
        let particle = PARTICLE_TABLE[rng.gen_range(0..PARTICLE_TABLE.len())];
        let (lo, hi) = cfg.energy_range;
        let ke = lo * (hi / lo).powf(rng.gen::<f64>());
        let cos_t: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let dir = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t);
        let p = (ke * ke + 2.0 * ke * particle.mass).sqrt();
        let at = |s: f64| helix_point(cfg.origin, dir, particle.charge, p, field_tesla, s);
        let deposit = cfg.deposit_per_step * particle.charge.abs();

        let mut points = vec![StepPoint { position: cfg.origin, energy_deposit: 0.0 }];
        let mut s = 0.0;
        while points.len() < cfg.max_points {
            let next = s + cfg.step;
            let q = at(next);
            if inside(&cfg.world, q) {
                points.push(StepPoint { position: q, energy_deposit: deposit });
                s = next;
                continue;
            }
            // Close the track on the world boundary.
            let (mut a, mut b) = (s, next);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if inside(&cfg.world, at(m)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            if a > s {
                points.push(StepPoint { position: at(a), energy_deposit: deposit * (a - s) / cfg.step });
            }
            break;
        }
        if particle.charge != 0.0 {
            for chunk in points[1..].chunks(10) {
                let last = chunk.last().expect("chunks are never empty");
                hits.push(Hit {
                    position: last.position,
                    energy_deposit: chunk.iter().map(|p| p.energy_deposit).sum(),
                    detector_name: "Tracker".into(),
                    extra: vec![],
                });
            }
        }
        trajectories.push(Trajectory {
            track_id: i as i32 + 1,
            parent_id: 0,
            particle_name: particle.name.to_string(),
            pdg_encoding: particle.pdg,
            charge: particle.charge,
            initial_kinetic_energy: ke,
            initial_momentum: dir * p,
            points,
            creator_process: "primary".into(),
        });
    }
    Event { event_id, trajectories, hits }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = ToyConfig::default();
        assert_eq!(generate_toy_event(0, 42, 20, 1.0, &cfg), generate_toy_event(0, 42, 20, 1.0, &cfg));
        assert_ne!(generate_toy_event(0, 42, 20, 1.0, &cfg), generate_toy_event(0, 43, 20, 1.0, &cfg));
    }

    #[test]
    fn zero_field_is_straight() {
        let e = generate_toy_event(1, 7, 30, 0.0, &ToyConfig::default());
        for t in &e.trajectories {
            let pts = t.positions();
            let d = (pts[pts.len() - 1] - pts[0]).normalized();
            for p in &pts {
                let off = (*p - pts[0]) - d * (*p - pts[0]).dot(d);
                assert!(off.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn clipped_to_world() {
        let cfg = ToyConfig::with_world(Aabb::symmetric(Vec3::new(120.0, 120.0, 180.0)));
        let e = generate_toy_event(2, 9, 50, 1.0, &cfg);
        for t in &e.trajectories {
            assert!(t.points.iter().all(|p| inside(&cfg.world, p.position)));
            assert!(t.points.len() <= cfg.max_points);
        }
        assert!(e.hits.iter().all(|h| h.energy_deposit >= 0.0));
    }

    #[test]
    fn helix_radius() {
        // pT = 300 MeV in 1 T gives a 1 m radius: after half a turn the track is 2 m away.
        let dir = Vec3::new(1.0, 0.0, 0.0);
        let r = 1000.0;
        let half_turn = helix_point(Vec3::zero(), dir, 1.0, 300.0, 1.0, std::f64::consts::PI * r);
        assert!((half_turn.norm() - 2.0 * r).abs() < 1e-9);
    }
}
