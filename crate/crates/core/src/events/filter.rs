use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};

use super::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub enum FilterKind {
    /// Accepts listed particle names.
    Particle(BTreeSet<String>),
    /// Accepts listed charges, in units of the positron charge.
    Charge(Vec<f64>),
    /// Accepts trajectories whose numeric attribute lies in `[min, max]`.
    AttributeInterval { key: String, min: f64, max: f64 },
}

/// A named selection rule. Inactive filters accept everything.
#[derive(Debug)]
pub struct TrajectoryFilter {
    pub name: String,
    pub kind: FilterKind,
    pub invert: bool,
    pub active: bool,
    warned: AtomicBool,
}

impl Clone for TrajectoryFilter {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            kind: self.kind.clone(),
            invert: self.invert,
            active: self.active,
            warned: AtomicBool::new(self.warned.load(Ordering::Relaxed)),
        }
    }
}

impl PartialEq for TrajectoryFilter {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.kind == o.kind && self.invert == o.invert && self.active == o.active
    }
}

impl TrajectoryFilter {
    pub fn new(name: impl Into<String>, kind: FilterKind) -> Self {
        Self { name: name.into(), kind, invert: false, active: true, warned: AtomicBool::new(false) }
    }

    pub fn particle<'a>(name: impl Into<String>, names: impl IntoIterator<Item = &'a str>) -> Self {
        Self::new(name, FilterKind::Particle(names.into_iter().map(String::from).collect()))
    }

    pub fn charge(name: impl Into<String>, charges: impl IntoIterator<Item = f64>) -> Self {
        Self::new(name, FilterKind::Charge(charges.into_iter().collect()))
    }

    pub fn interval(name: impl Into<String>, key: impl Into<String>, min: f64, max: f64) -> Self {
        Self::new(name, FilterKind::AttributeInterval { key: key.into(), min, max })
    }

    pub fn inverted(mut self) -> Self {
        self.invert = !self.invert;
        self
    }

    /// Unknown interval keys reject every trajectory, warning once per filter.
    pub fn accept(&self, t: &Trajectory) -> bool {
        if !self.active {
            return true;
        }
        let pass = match &self.kind {
            FilterKind::Particle(names) => names.contains(&t.particle_name),
            FilterKind::Charge(charges) => charges.contains(&t.charge),
            FilterKind::AttributeInterval { key, min, max } => match t.numeric_attribute(key) {
                Some(v) => v >= *min && v <= *max,
                None => {
                    if !self.warned.swap(true, Ordering::Relaxed) {
                        log::warn!("filter \"{}\": no numeric trajectory attribute \"{key}\"", self.name);
                    }
                    return false;
                }
            },
        };
        pass != self.invert
    }

    /// Adds one entry to a particle or charge list; false for interval filters
    /// or an unparsable charge.
    pub fn add(&mut self, item: &str) -> bool {
        match &mut self.kind {
            FilterKind::Particle(names) => {
                names.insert(item.to_string());
                true
            }
            FilterKind::Charge(charges) => match item.parse::<f64>() {
                Ok(c) => {
                    charges.push(c);
                    true
                }
                Err(_) => false,
            },
            FilterKind::AttributeInterval { .. } => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FilterKind::Particle(_) => "particleFilter",
            FilterKind::Charge(_) => "chargeFilter",
            FilterKind::AttributeInterval { .. } => "attributeFilter",
        }
    }
}

/// Conjunction of filters. The empty chain accepts everything.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterChain {
    pub filters: Vec<TrajectoryFilter>,
}

impl FilterChain {
    pub fn new(filters: Vec<TrajectoryFilter>) -> Self {
        Self { filters }
    }

    pub fn accept(&self, t: &Trajectory) -> bool {
        self.filters.iter().all(|f| f.accept(t))
    }

    pub fn apply<'a>(&self, ts: impl IntoIterator<Item = &'a Trajectory>) -> Vec<&'a Trajectory> {
        ts.into_iter().filter(|t| self.accept(t)).collect()
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut TrajectoryFilter> {
        self.filters.iter_mut().find(|f| f.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate_toy_event, ToyConfig};
    use super::*;

    fn track(name: &str, charge: f64) -> Trajectory {
        let e = generate_toy_event(0, 1, 1, 0.0, &ToyConfig::default());
        Trajectory { particle_name: name.into(), charge, ..e.trajectories[0].clone() }
    }

    #[test]
    fn particle_filter() {
        let f = TrajectoryFilter::particle("particleFilter-0", ["gamma"]);
        assert!(f.accept(&track("gamma", 0.0)));
        assert!(!f.accept(&track("e-", -1.0)));
        assert!(FilterChain::default().accept(&track("anything", 2.0)));
    }

    #[test]
    fn inverted_conjunction() {
        let chain = FilterChain::new(vec![
            TrajectoryFilter::particle("p", ["gamma"]).inverted(),
            TrajectoryFilter::charge("c", [-1.0]),
        ]);
        assert!(chain.accept(&track("e-", -1.0)));
        assert!(!chain.accept(&track("e+", 1.0)));
        assert!(!chain.accept(&track("gamma", 0.0)));
    }

    #[test]
    fn unknown_key_rejects() {
        let f = TrajectoryFilter::interval("i", "Bogus", 0.0, 1.0);
        assert!(!f.accept(&track("e-", -1.0)));
        assert!(!f.accept(&track("e-", -1.0)));
        let mut inactive = f.clone();
        inactive.active = false;
        assert!(inactive.accept(&track("e-", -1.0)));
    }

    #[test]
    fn momentum_interval() {
        let t = track("e-", -1.0);
        let p = t.initial_momentum_magnitude();
        assert!(TrajectoryFilter::interval("m", "IMag", p - 1.0, p + 1.0).accept(&t));
        assert!(!TrajectoryFilter::interval("m", "IMag", p + 1.0, p + 2.0).accept(&t));
    }
}
