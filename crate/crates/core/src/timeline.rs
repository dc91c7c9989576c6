//! Timed segments of body motion with at most one swinging leg each.

use nalgebra::{Rotation2, Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::model::{Leg, Pose, RobotState};
use crate::swing::{smoothstep, SwingSpec};

/// Time tolerance (s) for contiguity checks.
pub const TIME_TOL: f64 = 1e-9;
/// Position tolerance (m) for liftoff bookkeeping.
pub const POS_TOL: f64 = 1e-9;

/// Which part of a plan a segment belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Stationary-body relocation into a gait's starting configuration.
    Transition,
    /// Stationary-body relocation back to the workspace centres.
    Reset,
    Walk,
    Ascent,
    Descent,
    Spin,
}

impl Phase {
    /// Foot relocation with the body at rest.
    pub fn is_transition(self) -> bool {
        matches!(self, Phase::Transition | Phase::Reset)
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Transition => "transition",
            Phase::Reset => "reset",
            Phase::Walk => "walk",
            Phase::Ascent => "ascent",
            Phase::Descent => "descent",
            Phase::Spin => "spin",
        }
    }
}

/// Time law of the body within a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Linear,
    /// Mix of constant speed and a rest-to-rest quintic:
    /// `κτ + (1 − κ)·s(τ)`. `κ = 1` is constant speed.
    Blend {
        kappa: f64,
    },
}

impl Profile {
    pub fn fraction(&self, tau: f64) -> f64 {
        match *self {
            Profile::Linear => tau,
            Profile::Blend { kappa } => kappa * tau + (1.0 - kappa) * smoothstep(tau),
        }
    }
}

/// Body displacement over a segment, in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyMotion {
    pub translation: Vector3<f64>,
    pub rotation: f64,
    pub profile: Profile,
}

impl BodyMotion {
    pub fn still() -> Self {
        BodyMotion {
            translation: Vector3::zeros(),
            rotation: 0.0,
            profile: Profile::Linear,
        }
    }

    pub fn translate(translation: Vector3<f64>, profile: Profile) -> Self {
        BodyMotion {
            translation,
            rotation: 0.0,
            profile,
        }
    }

    pub fn rotate(rotation: f64) -> Self {
        BodyMotion {
            translation: Vector3::zeros(),
            rotation,
            profile: Profile::Linear,
        }
    }

    pub fn pose_at(&self, start: &Pose, tau: f64) -> Pose {
        let f = self.profile.fraction(tau);
        Pose::new(
            start.position + self.translation * f,
            start.yaw + self.rotation * f,
        )
    }

    pub fn end_pose(&self, start: &Pose) -> Pose {
        Pose::new(start.position + self.translation, start.yaw + self.rotation)
    }
}

/// Coordinates in which a swing displacement is expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwingFrame {
    /// Fixed to the ground; the swing x axis points along world yaw `yaw`.
    Ground { yaw: f64 },
    /// Moves with the body; x, y are body axes.
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingRecord {
    pub leg: Leg,
    pub spec: SwingSpec,
    pub t_s: f64,
    pub frame: SwingFrame,
    /// Liftoff point in world coordinates.
    pub liftoff: Vector3<f64>,
    /// Liftoff point in the body frame at liftoff.
    pub liftoff_body: Vector3<f64>,
}

impl SwingRecord {
    pub fn new(leg: Leg, start: &RobotState, spec: SwingSpec, t_s: f64, frame: SwingFrame) -> Self {
        SwingRecord {
            leg,
            spec,
            t_s,
            frame,
            liftoff: start.foot(leg).position,
            liftoff_body: start.foot_body(leg),
        }
    }

    /// World position of the swinging foot at swing time `t` given the body pose then.
    pub fn foot_at(&self, t: f64, body: &Pose) -> Result<Vector3<f64>> {
        let rel = self.spec.sample(t, self.t_s)?.position;
        Ok(self.place(&rel, body))
    }

    fn place(&self, rel: &Vector3<f64>, body: &Pose) -> Vector3<f64> {
        match self.frame {
            SwingFrame::Ground { yaw } => {
                let xy = Rotation2::new(yaw) * Vector2::new(rel.x, rel.y);
                self.liftoff + Vector3::new(xy.x, xy.y, rel.z)
            }
            SwingFrame::Body => body.body_to_world(&(self.liftoff_body + rel)),
        }
    }

    /// Touchdown point given the body pose at touchdown.
    pub fn touchdown(&self, body: &Pose) -> Vector3<f64> {
        let rel = Vector3::new(self.spec.x_f, self.spec.y_f, self.spec.z_f);
        self.place(&rel, body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub motion: BodyMotion,
    pub swing: Option<SwingRecord>,
    pub phase: Phase,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// State at absolute time `t` inside the segment. At `t_start` the
    /// swinging foot is still counted as supporting, at `t_end` it has landed.
    pub fn state_at(&self, start: &RobotState, t: f64) -> Result<RobotState> {
        let dur = self.duration();
        let tau = if dur > 0.0 {
            ((t - self.t_start) / dur).clamp(0.0, 1.0)
        } else {
            1.0
        };
        if tau >= 1.0 {
            return Ok(self.end_state(start));
        }
        let mut s = *start;
        s.body = self.motion.pose_at(&start.body, tau);
        if let Some(sw) = &self.swing {
            let body = s.body;
            let foot = s.foot_mut(sw.leg);
            foot.position = sw.foot_at(tau * sw.spec.t_sw, &body)?;
            foot.support = tau == 0.0;
        }
        Ok(s)
    }

    pub fn end_state(&self, start: &RobotState) -> RobotState {
        let mut s = *start;
        s.body = self.motion.end_pose(&start.body);
        if let Some(sw) = &self.swing {
            let body = s.body;
            let foot = s.foot_mut(sw.leg);
            foot.position = sw.touchdown(&body);
            foot.support = true;
        }
        s
    }
}

/// A contiguous sequence of segments starting from a known state.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub initial: RobotState,
    pub t_start: f64,
    pub segments: Vec<Segment>,
    end: RobotState,
}

impl Timeline {
    pub fn new(initial: RobotState, t_start: f64) -> Self {
        Timeline {
            initial,
            t_start,
            segments: Vec::new(),
            end: initial,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(self.t_start, |s| s.t_end)
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start
    }

    /// State after the last segment.
    pub fn final_state(&self) -> &RobotState {
        &self.end
    }

    /// Appends a segment of length `duration` starting at the current end.
    pub fn push(
        &mut self,
        duration: f64,
        motion: BodyMotion,
        swing: Option<SwingRecord>,
        phase: Phase,
    ) -> Result<()> {
        let t_start = self.t_end();
        self.push_segment(Segment {
            t_start,
            t_end: t_start + duration,
            motion,
            swing,
            phase,
        })
    }

    pub fn push_segment(&mut self, seg: Segment) -> Result<()> {
        check_segment(&seg, self.t_end(), &self.end)?;
        self.end = seg.end_state(&self.end);
        self.segments.push(seg);
        Ok(())
    }

    /// Appends `other`, shifting its times to start at the current end.
    /// Its initial state must equal the current final state.
    pub fn append(&mut self, other: &Timeline) -> Result<()> {
        let gap = states_distance(&self.end, &other.initial);
        if gap > POS_TOL {
            return Err(GaitError::MalformedTimeline(format!(
                "appended timeline starts {gap:.3e} away from the current end state"
            )));
        }
        let shift = self.t_end() - other.t_start;
        for seg in &other.segments {
            let mut s = *seg;
            s.t_start += shift;
            s.t_end += shift;
            self.push_segment(s)?;
        }
        Ok(())
    }

    /// Re-checks every structural invariant from scratch.
    pub fn validate(&self) -> Result<()> {
        let mut t = self.t_start;
        let mut state = self.initial;
        for seg in &self.segments {
            check_segment(seg, t, &state)?;
            state = seg.end_state(&state);
            t = seg.t_end;
        }
        Ok(())
    }

    /// States at the start of every segment followed by the final state.
    pub fn boundary_states(&self) -> Vec<RobotState> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut s = self.initial;
        out.push(s);
        for seg in &self.segments {
            s = seg.end_state(&s);
            out.push(s);
        }
        out
    }

    pub fn state_at(&self, t: f64) -> Result<RobotState> {
        if t.is_nan() || t < self.t_start - TIME_TOL || t > self.t_end() + TIME_TOL {
            return Err(GaitError::TimeOutOfRange {
                t,
                duration: self.duration(),
            });
        }
        let mut s = self.initial;
        for seg in &self.segments {
            if t < seg.t_end {
                return seg.state_at(&s, t);
            }
            s = seg.end_state(&s);
        }
        Ok(s)
    }
}

fn states_distance(a: &RobotState, b: &RobotState) -> f64 {
    let mut d = (a.body.position - b.body.position)
        .norm()
        .max((a.body.yaw - b.body.yaw).abs());
    for leg in Leg::ALL {
        d = d.max((a.foot(leg).position - b.foot(leg).position).norm());
    }
    d
}

fn check_segment(seg: &Segment, t_prev: f64, state: &RobotState) -> Result<()> {
    if (seg.t_start - t_prev).abs() > TIME_TOL {
        return Err(GaitError::MalformedTimeline(format!(
            "segment starting at {} does not follow the previous end {t_prev}",
            seg.t_start
        )));
    }
    let dur = seg.duration();
    if !(dur >= 0.0) {
        return Err(GaitError::MalformedTimeline(format!(
            "segment at {} has negative duration {dur}",
            seg.t_start
        )));
    }
    if let Some(sw) = &seg.swing {
        if !(dur > 0.0) || (sw.spec.t_sw - dur).abs() > TIME_TOL {
            return Err(GaitError::MalformedTimeline(format!(
                "swing of leg {} lasts {} but its segment lasts {dur}",
                sw.leg, sw.spec.t_sw
            )));
        }
        let foot = state.foot(sw.leg);
        if !foot.support {
            return Err(GaitError::MalformedTimeline(format!(
                "leg {} is lifted at {} while already airborne",
                sw.leg, seg.t_start
            )));
        }
        if (foot.position - sw.liftoff).norm() > POS_TOL {
            return Err(GaitError::MalformedTimeline(format!(
                "leg {} lifts off at {:?} but stands at {:?}",
                sw.leg, sw.liftoff, foot.position
            )));
        }
    }
    Ok(())
}
