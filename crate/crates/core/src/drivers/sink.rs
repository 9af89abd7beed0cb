use thiserror::Error;

use crate::att::AttValue;
use crate::colour::Colour;
use crate::events::{DrawStyle, Hit, Trajectory};
use crate::geometry::{Touchable, VisAttributes};
use crate::scene::Primitive;
use crate::view::ViewParameters;
use crate::{Solid, Transform};

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Render(String),
}

/// Where a solid delivered to a sink came from.
#[derive(Clone, Debug, PartialEq)]
pub enum SolidOrigin {
    Touchable { touchable: Touchable, attributes: Vec<AttValue> },
    User { action: String },
}

impl SolidOrigin {
    pub fn label(&self) -> String {
        match self {
            SolidOrigin::Touchable { touchable, .. } => touchable.path_string(),
            SolidOrigin::User { action } => format!("user:{action}"),
        }
    }

    pub fn attributes(&self) -> &[AttValue] {
        match self {
            SolidOrigin::Touchable { attributes, .. } => attributes,
            SolidOrigin::User { .. } => &[],
        }
    }
}

impl PartialEq for Touchable {
    fn eq(&self, o: &Self) -> bool {
        self.path == o.path
            && self.physical == o.physical
            && self.world_transform == o.world_transform
            && self.vis == o.vis
            && *self.solid == *o.solid
    }
}

/// The low-level scene interface every driver implements. Calls arrive in
/// brackets: `pre_add_solid`/`add_solid`/`post_add_solid` for solids,
/// `begin_primitives[_2d]`/`add_primitive`/`end_primitives[_2d]` for
/// primitives, all inside `begin_session`/`end_session`.
pub trait SceneSink {
    fn begin_session(&mut self, view: &ViewParameters) -> Result<(), SinkError>;
    fn pre_add_solid(
        &mut self,
        transform: &Transform,
        vis: &VisAttributes,
        origin: &SolidOrigin,
    ) -> Result<(), SinkError>;
    fn add_solid(&mut self, solid: &Solid) -> Result<(), SinkError>;
    fn post_add_solid(&mut self) -> Result<(), SinkError>;
    fn begin_primitives(&mut self, transform: &Transform) -> Result<(), SinkError>;
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError>;
    fn add_primitive(&mut self, p: &Primitive) -> Result<(), SinkError>;
    fn end_primitives(&mut self) -> Result<(), SinkError>;
    fn end_primitives_2d(&mut self) -> Result<(), SinkError>;
    fn add_trajectory(&mut self, t: &Trajectory, style: &DrawStyle, attributes: &[AttValue]) -> Result<(), SinkError>;
    fn add_hit(&mut self, h: &Hit, colour: Colour, attributes: &[AttValue]) -> Result<(), SinkError>;
    fn end_session(&mut self) -> Result<(), SinkError>;
}

/// One recorded sink call.
#[derive(Clone, Debug, PartialEq)]
pub enum Call {
    BeginSession,
    PreAddSolid { transform: Transform, vis: VisAttributes, origin: SolidOrigin },
    AddSolid(Solid),
    PostAddSolid,
    BeginPrimitives(Transform),
    BeginPrimitives2D,
    AddPrimitive(Primitive),
    EndPrimitives,
    EndPrimitives2D,
    AddTrajectory { trajectory: Trajectory, style: DrawStyle, attributes: Vec<AttValue> },
    AddHit { hit: Hit, colour: Colour, attributes: Vec<AttValue> },
    EndSession,
}

impl Call {
    pub fn name(&self) -> &'static str {
        match self {
            Call::BeginSession => "begin_session",
            Call::PreAddSolid { .. } => "pre_add_solid",
            Call::AddSolid(_) => "add_solid",
            Call::PostAddSolid => "post_add_solid",
            Call::BeginPrimitives(_) => "begin_primitives",
            Call::BeginPrimitives2D => "begin_primitives_2d",
            Call::AddPrimitive(_) => "add_primitive",
            Call::EndPrimitives => "end_primitives",
            Call::EndPrimitives2D => "end_primitives_2d",
            Call::AddTrajectory { .. } => "add_trajectory",
            Call::AddHit { .. } => "add_hit",
            Call::EndSession => "end_session",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
enum State {
    #[default]
    Closed,
    Idle,
    SolidOpen,
    SolidAdded,
    Primitives,
    Primitives2D,
}

/// Records every call and rejects out-of-order ones.
#[derive(Clone, Debug, Default)]
pub struct ProtocolRecorder {
    pub calls: Vec<Call>,
    state: State,
    sessions: usize,
}

impl ProtocolRecorder {
    fn step(&mut self, call: Call, from: &[State], to: State) -> Result<(), SinkError> {
        if !from.contains(&self.state) {
            return Err(SinkError::Protocol(format!("{} called in state {:?}", call.name(), self.state)));
        }
        if matches!(call, Call::BeginSession) {
            self.sessions += 1;
        }
        self.state = to;
        self.calls.push(call);
        Ok(())
    }

    pub fn call_names(&self) -> Vec<&'static str> {
        self.calls.iter().map(Call::name).collect()
    }

    pub fn primitives(&self) -> Vec<&Primitive> {
        self.calls
            .iter()
            .filter_map(|c| match c {
                Call::AddPrimitive(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    pub fn trajectories(&self) -> Vec<&Trajectory> {
        self.calls
            .iter()
            .filter_map(|c| match c {
                Call::AddTrajectory { trajectory, .. } => Some(trajectory),
                _ => None,
            })
            .collect()
    }

    /// Transient calls (trajectories and hits) in delivery order.
    pub fn transient_calls(&self) -> Vec<&Call> {
        self.calls.iter().filter(|c| matches!(c, Call::AddTrajectory { .. } | Call::AddHit { .. })).collect()
    }

    /// True when every session that was opened was also closed.
    pub fn is_balanced(&self) -> bool {
        self.state == State::Closed
    }

    pub fn sessions(&self) -> usize {
        self.sessions
    }
}

impl SceneSink for ProtocolRecorder {
    fn begin_session(&mut self, _view: &ViewParameters) -> Result<(), SinkError> {
        self.step(Call::BeginSession, &[State::Closed], State::Idle)
    }
    fn pre_add_solid(
        &mut self,
        transform: &Transform,
        vis: &VisAttributes,
        origin: &SolidOrigin,
    ) -> Result<(), SinkError> {
        let call = Call::PreAddSolid { transform: *transform, vis: *vis, origin: origin.clone() };
        self.step(call, &[State::Idle], State::SolidOpen)
    }
    fn add_solid(&mut self, solid: &Solid) -> Result<(), SinkError> {
        self.step(Call::AddSolid(solid.clone()), &[State::SolidOpen], State::SolidAdded)
    }
    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        self.step(Call::PostAddSolid, &[State::SolidOpen, State::SolidAdded], State::Idle)
    }
    fn begin_primitives(&mut self, transform: &Transform) -> Result<(), SinkError> {
        self.step(Call::BeginPrimitives(*transform), &[State::Idle], State::Primitives)
    }
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.step(Call::BeginPrimitives2D, &[State::Idle], State::Primitives2D)
    }
    fn add_primitive(&mut self, p: &Primitive) -> Result<(), SinkError> {
        let s = self.state;
        self.step(Call::AddPrimitive(p.clone()), &[State::Primitives, State::Primitives2D], s)
    }
    fn end_primitives(&mut self) -> Result<(), SinkError> {
        self.step(Call::EndPrimitives, &[State::Primitives], State::Idle)
    }
    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.step(Call::EndPrimitives2D, &[State::Primitives2D], State::Idle)
    }
    fn add_trajectory(&mut self, t: &Trajectory, style: &DrawStyle, attributes: &[AttValue]) -> Result<(), SinkError> {
        let call = Call::AddTrajectory { trajectory: t.clone(), style: *style, attributes: attributes.to_vec() };
        self.step(call, &[State::Idle], State::Idle)
    }
    fn add_hit(&mut self, h: &Hit, colour: Colour, attributes: &[AttValue]) -> Result<(), SinkError> {
        let call = Call::AddHit { hit: h.clone(), colour, attributes: attributes.to_vec() };
        self.step(call, &[State::Idle], State::Idle)
    }
    fn end_session(&mut self) -> Result<(), SinkError> {
        self.step(Call::EndSession, &[State::Idle], State::Closed)
    }
}

/// Counts calls by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountingSink {
    pub sessions: usize,
    pub solids: usize,
    pub primitives: usize,
    pub primitives_2d: usize,
    pub trajectories: usize,
    pub hits: usize,
    in_2d: bool,
}

impl SceneSink for CountingSink {
    fn begin_session(&mut self, _view: &ViewParameters) -> Result<(), SinkError> {
        self.sessions += 1;
        Ok(())
    }
    fn pre_add_solid(&mut self, _: &Transform, _: &VisAttributes, _: &SolidOrigin) -> Result<(), SinkError> {
        Ok(())
    }
    fn add_solid(&mut self, _: &Solid) -> Result<(), SinkError> {
        self.solids += 1;
        Ok(())
    }
    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn begin_primitives(&mut self, _: &Transform) -> Result<(), SinkError> {
        self.in_2d = false;
        Ok(())
    }
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.in_2d = true;
        Ok(())
    }
    fn add_primitive(&mut self, _: &Primitive) -> Result<(), SinkError> {
        if self.in_2d {
            self.primitives_2d += 1;
        } else {
            self.primitives += 1;
        }
        Ok(())
    }
    fn end_primitives(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.in_2d = false;
        Ok(())
    }
    fn add_trajectory(&mut self, _: &Trajectory, _: &DrawStyle, _: &[AttValue]) -> Result<(), SinkError> {
        self.trajectories += 1;
        Ok(())
    }
    fn add_hit(&mut self, _: &Hit, _: Colour, _: &[AttValue]) -> Result<(), SinkError> {
        self.hits += 1;
        Ok(())
    }
    fn end_session(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
}

/// Forwards every call to two sinks, first `a` then `b`.
pub struct Tee<'a> {
    pub a: &'a mut dyn SceneSink,
    pub b: &'a mut dyn SceneSink,
}

impl<'a> Tee<'a> {
    pub fn new(a: &'a mut dyn SceneSink, b: &'a mut dyn SceneSink) -> Self {
        Self { a, b }
    }
}

impl SceneSink for Tee<'_> {
    fn begin_session(&mut self, view: &ViewParameters) -> Result<(), SinkError> {
        self.a.begin_session(view)?;
        self.b.begin_session(view)
    }
    fn pre_add_solid(&mut self, t: &Transform, v: &VisAttributes, o: &SolidOrigin) -> Result<(), SinkError> {
        self.a.pre_add_solid(t, v, o)?;
        self.b.pre_add_solid(t, v, o)
    }
    fn add_solid(&mut self, s: &Solid) -> Result<(), SinkError> {
        self.a.add_solid(s)?;
        self.b.add_solid(s)
    }
    fn post_add_solid(&mut self) -> Result<(), SinkError> {
        self.a.post_add_solid()?;
        self.b.post_add_solid()
    }
    fn begin_primitives(&mut self, t: &Transform) -> Result<(), SinkError> {
        self.a.begin_primitives(t)?;
        self.b.begin_primitives(t)
    }
    fn begin_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.a.begin_primitives_2d()?;
        self.b.begin_primitives_2d()
    }
    fn add_primitive(&mut self, p: &Primitive) -> Result<(), SinkError> {
        self.a.add_primitive(p)?;
        self.b.add_primitive(p)
    }
    fn end_primitives(&mut self) -> Result<(), SinkError> {
        self.a.end_primitives()?;
        self.b.end_primitives()
    }
    fn end_primitives_2d(&mut self) -> Result<(), SinkError> {
        self.a.end_primitives_2d()?;
        self.b.end_primitives_2d()
    }
    fn add_trajectory(&mut self, t: &Trajectory, s: &DrawStyle, a: &[AttValue]) -> Result<(), SinkError> {
        self.a.add_trajectory(t, s, a)?;
        self.b.add_trajectory(t, s, a)
    }
    fn add_hit(&mut self, h: &Hit, c: Colour, a: &[AttValue]) -> Result<(), SinkError> {
        self.a.add_hit(h, c, a)?;
        self.b.add_hit(h, c, a)
    }
    fn end_session(&mut self) -> Result<(), SinkError> {
        self.a.end_session()?;
        self.b.end_session()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recorder_rejects_bad_order() {
        let mut r = ProtocolRecorder::default();
        assert!(r.add_solid(&Solid::new_box("b", 1.0, 1.0, 1.0).unwrap()).is_err());
        r.begin_session(&ViewParameters::default()).unwrap();
        r.begin_primitives_2d().unwrap();
        assert!(r.end_primitives().is_err());
        r.end_primitives_2d().unwrap();
        assert!(r.post_add_solid().is_err());
        r.end_session().unwrap();
        assert!(r.is_balanced());
    }
}
