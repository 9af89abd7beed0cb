//! Event data: trajectories, hits, the retained-event store, the toy event
//! source, and the trajectory models and filters used at drawing time.

mod attributes;
mod filter;
pub mod io;
mod model;
mod toy;

use std::collections::VecDeque;

use thiserror::Error;

use crate::att::AttValue;
use crate::Vec3;

pub use attributes::{hit_att_defs, hit_attributes, trajectory_att_defs, trajectory_attributes};
pub use filter::{FilterChain, FilterKind, TrajectoryFilter};
pub use model::{DrawStyle, ModelKind, TrajectoryModel};
pub use toy::{generate_toy_event, helix_point, ParticleType, ToyConfig, PARTICLE_TABLE};

pub const DEFAULT_STORE_CAPACITY: usize = 100;

#[derive(Debug, Error)]
pub enum EventsError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPoint {
    pub position: Vec3,
    /// Total energy deposited in the step ending at this point, MeV.
    pub energy_deposit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub track_id: i32,
    pub parent_id: i32,
    pub particle_name: String,
    pub pdg_encoding: i32,
    /// In units of the positron charge.
    pub charge: f64,
    /// MeV.
    pub initial_kinetic_energy: f64,
    /// MeV.
    pub initial_momentum: Vec3,
    pub points: Vec<StepPoint>,
    pub creator_process: String,
}

impl Trajectory {
    pub fn initial_momentum_magnitude(&self) -> f64 {
        self.initial_momentum.norm()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub position: Vec3,
    /// MeV, never negative.
    pub energy_deposit: f64,
    pub detector_name: String,
    pub extra: Vec<AttValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub event_id: i32,
    pub trajectories: Vec<Trajectory>,
    pub hits: Vec<Hit>,
}

/// Ring buffer of the most recent events.
#[derive(Clone, Debug, PartialEq)]
pub struct EventStore {
    capacity: usize,
    events: VecDeque<Event>,
}

impl Default for EventStore {
    fn default() -> Self {
        Self::new(DEFAULT_STORE_CAPACITY)
    }
}

impl EventStore {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, events: VecDeque::with_capacity(capacity.min(1024)) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends an event, evicting the oldest beyond capacity.
    pub fn push(&mut self, event: Event) {
        if self.capacity == 0 {
            return;
        }
        while self.events.len() >= self.capacity {
            self.events.pop_front();
        }
        self.events.push_back(event);
    }

    /// Changes the capacity, dropping the oldest events that no longer fit.
    /// A capacity of zero empties the store and keeps it empty.
    pub fn set_capacity(&mut self, capacity: usize) {
        if capacity == 0 {
            log::warn!("event store capacity set to 0: transients can no longer be recovered");
        }
        self.capacity = capacity;
        while self.events.len() > capacity {
            self.events.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn clear(&mut self) {
        self.events.clear();
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Event> + ExactSizeIterator {
        self.events.iter()
    }

    pub fn latest(&self) -> Option<&Event> {
        self.events.back()
    }

    pub fn to_vec(&self) -> Vec<Event> {
        self.events.iter().cloned().collect()
    }
}
