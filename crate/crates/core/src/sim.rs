//! Fixed-step kinematic replay and the walk / climb / turn / descend scenario.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::model::{Leg, Pose, RobotModel, RobotState, WORKSPACE_TOL};
use crate::spin::{spin_cycles_for, spin_timeline, SpinDirection, SpinSchedule};
use crate::stability::state_margin;
use crate::terrain::{StairProfile, Terrain};
use crate::timeline::{Phase, Timeline};
use crate::transition::{plan_wave_transition, search_transition, transition_timeline};
use crate::wave::{footprint_spacing, wave_cycles, GaitParams};

/// Default sample period (s).
pub const DEFAULT_DT: f64 = 1e-3;
/// Allowed support-foot drift between samples and off-terrain distance (m).
pub const CONTACT_TOL: f64 = 1e-9;
/// Moves allowed when searching gait-change transitions.
pub const MAX_TRANSITION_MOVES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// CoM outside the support polygon.
    Stability {
        margin: f64,
    },
    Workspace {
        leg: Leg,
        excess: f64,
    },
    /// Swing foot below the terrain.
    Clearance {
        leg: Leg,
        clearance: f64,
    },
    /// Supporting foot off the terrain surface.
    Contact {
        leg: Leg,
        gap: f64,
    },
    /// Supporting foot moved between samples.
    Slip {
        leg: Leg,
        distance: f64,
    },
    /// Fewer than three feet on the ground.
    SupportCount {
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    SegmentStart { index: usize, phase: Phase },
    Lift { leg: Leg },
    Touchdown { leg: Leg },
    Violation(Violation),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: RobotState,
    /// Signed static stability margin (m).
    pub margin: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl SimTrace {
    pub fn violations(&self) -> impl Iterator<Item = (f64, &Violation)> {
        self.events.iter().filter_map(|e| match &e.kind {
            EventKind::Violation(v) => Some((e.t, v)),
            _ => None,
        })
    }

    pub fn has_violations(&self) -> bool {
        self.violations().next().is_some()
    }

    pub fn min_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// First sample at or after `t`.
    pub fn sample_at(&self, t: f64) -> Option<&Sample> {
        let i = self.samples.partition_point(|s| s.t < t - 1e-12);
        self.samples.get(i)
    }
}

/// The `(t, margin)` series.
pub fn margin_trace(trace: &SimTrace) -> Vec<(f64, f64)> {
    trace.samples.iter().map(|s| (s.t, s.margin)).collect()
}

struct Recorder<'a> {
    model: &'a RobotModel,
    terrain: &'a Terrain,
    trace: SimTrace,
    last: Option<RobotState>,
}

impl Recorder<'_> {
    fn violation(&mut self, t: f64, v: Violation) {
        self.trace.events.push(Event {
            t,
            kind: EventKind::Violation(v),
        });
    }

    fn record(&mut self, t: f64, state: RobotState, phase: Phase) {
        let margin = match state_margin(&state) {
            Ok(m) => m,
            Err(_) => f64::NEG_INFINITY,
        };
        if margin < 0.0 {
            self.violation(t, Violation::Stability { margin });
        }
        let count = state.support_count();
        if count < 3 {
            self.violation(t, Violation::SupportCount { count });
        }
        for leg in Leg::ALL {
            let excess = self.model.workspace(leg).excess(&state.foot_body(leg));
            if excess > WORKSPACE_TOL {
                self.violation(t, Violation::Workspace { leg, excess });
            }
            let foot = state.foot(leg);
            let ground = self.terrain.height_at(&foot.position.xy());
            let gap = foot.position.z - ground;
            if foot.support {
                if gap.abs() > CONTACT_TOL {
                    self.violation(t, Violation::Contact { leg, gap });
                }
                if let Some(prev) = &self.last {
                    let p = prev.foot(leg);
                    let distance = (p.position - foot.position).norm();
                    if p.support && distance > CONTACT_TOL {
                        self.violation(t, Violation::Slip { leg, distance });
                    }
                }
            } else if gap < 0.0 {
                self.violation(
                    t,
                    Violation::Clearance {
                        leg,
                        clearance: gap,
                    },
                );
            }
        }
        self.last = Some(state);
        self.trace.samples.push(Sample {
            t,
            state,
            margin,
            phase,
        });
    }
}

/// Replays `timeline` every `dt` seconds, with extra samples on every
/// segment boundary. Physical violations are logged, not raised.
pub fn simulate(
    timeline: &Timeline,
    model: &RobotModel,
    terrain: &Terrain,
    dt: f64,
) -> Result<SimTrace> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(GaitError::param(
            "dt",
            format!("must be positive, got {dt}"),
        ));
    }
    timeline.validate()?;
    let t0 = timeline.t_start;
    let mut rec = Recorder {
        model,
        terrain,
        trace: SimTrace {
            dt,
            samples: Vec::new(),
            events: Vec::new(),
        },
        last: None,
    };
    let mut state = timeline.initial;
    let mut airborne: Option<Leg> = None;
    for (index, seg) in timeline.segments.iter().enumerate() {
        if let Some(leg) = airborne.take() {
            rec.trace.events.push(Event {
                t: seg.t_start,
                kind: EventKind::Touchdown { leg },
            });
        }
        rec.trace.events.push(Event {
            t: seg.t_start,
            kind: EventKind::SegmentStart {
                index,
                phase: seg.phase,
            },
        });
        if seg.duration() > 0.0 {
            if let Some(sw) = &seg.swing {
                rec.trace.events.push(Event {
                    t: seg.t_start,
                    kind: EventKind::Lift { leg: sw.leg },
                });
                airborne = Some(sw.leg);
            }
            rec.record(seg.t_start, seg.state_at(&state, seg.t_start)?, seg.phase);
            let mut k = ((seg.t_start - t0) / dt).floor() as i64 + 1;
            loop {
                let t = t0 + k as f64 * dt;
                if t >= seg.t_end - 1e-12 {
                    break;
                }
                if t > seg.t_start + 1e-12 {
                    rec.record(t, seg.state_at(&state, t)?, seg.phase);
                }
                k += 1;
            }
        }
        state = seg.end_state(&state);
    }
    if let (Some(leg), Some(seg)) = (airborne, timeline.segments.last()) {
        rec.trace.events.push(Event {
            t: seg.t_end,
            kind: EventKind::Touchdown { leg },
        });
    }
    let last_phase = timeline.segments.last().map_or(Phase::Walk, |s| s.phase);
    rec.record(timeline.t_end(), state, last_phase);
    Ok(rec.trace)
}

/// Scenario knobs not fixed by the robot and gait parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Level-ground cycles before the stairs.
    pub level_cycles: usize,
    /// Risers per flight; must be even so each leg climbs two per cycle.
    pub stair_count: usize,
    /// Spin angle (rad, positive).
    pub spin_target: f64,
    pub spin_direction: SpinDirection,
    pub dt: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            level_cycles: 2,
            stair_count: 4,
            spin_target: FRAC_PI_2,
            spin_direction: SpinDirection::Ccw,
            dt: DEFAULT_DT,
        }
    }
}

/// Time span of one part of the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub timeline: Timeline,
    pub terrain: Terrain,
    pub ascent: StairProfile,
    pub descent: StairProfile,
    pub stages: Vec<Stage>,
    /// Start times of the ascent cycles followed by the ascent end.
    pub ascent_cycle_times: Vec<f64>,
    pub trace: SimTrace,
}

impl CaseStudy {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

struct Builder<'a> {
    model: &'a RobotModel,
    params: &'a GaitParams,
    terrain: Terrain,
    timeline: Timeline,
    stages: Vec<Stage>,
}

impl Builder<'_> {
    fn state(&self) -> RobotState {
        *self.timeline.final_state()
    }

    fn add(&mut self, name: &'static str, part: Timeline) -> Result<()> {
        let t_start = self.timeline.t_end();
        self.timeline.append(&part)?;
        self.stages.push(Stage {
            name,
            t_start,
            t_end: self.timeline.t_end(),
        });
        Ok(())
    }

    fn relocate(
        &mut self,
        name: &'static str,
        goal: &crate::model::FootholdConfig,
        phase: Phase,
    ) -> Result<()> {
        let plan = search_transition(
            self.model,
            &self.state().config(),
            goal,
            MAX_TRANSITION_MOVES,
        )?;
        let part = transition_timeline(
            self.params,
            &self.state(),
            self.timeline.t_end(),
            &plan,
            phase,
        )?;
        self.add(name, part)
    }

    fn wave_transition(&mut self, name: &'static str) -> Result<()> {
        let plan = plan_wave_transition(self.model, self.params)?;
        if self.state().config().max_distance(&plan.start) > 1e-9 {
            return Err(GaitError::Infeasible(
                "wave transition must start from the workspace centres".into(),
            ));
        }
        let part = transition_timeline(
            self.params,
            &self.state(),
            self.timeline.t_end(),
            &plan,
            Phase::Transition,
        )?;
        self.add(name, part)
    }

    fn walk(&mut self, name: &'static str, cycles: usize, rise: f64, phase: Phase) -> Result<()> {
        let part = wave_cycles(
            self.model,
            self.params,
            &self.terrain,
            &self.state(),
            self.timeline.t_end(),
            cycles,
            rise,
            phase,
        )?;
        self.add(name, part)
    }
}

/// Horizontal distance from the body centre to the farthest workspace corner.
fn reach(model: &RobotModel) -> f64 {
    (model.p_x / 2.0 + model.r_x / 2.0).hypot(model.p_y / 2.0 + model.r_y / 2.0)
}

/// Cycles needed for the body to get `reach` past `edge` along its heading.
fn cycles_past(body_u: f64, edge: f64, reach: f64, lambda: f64) -> usize {
    ((edge + reach - body_u) / lambda).ceil().max(1.0) as usize
}

/// Builds and replays the full scenario: wave transition, level walk, stair
/// ascent, walk onto the landing, reset, spin transition, spin, reset, wave
/// transition, approach, stair descent and walk off the flight.
pub fn run_case_study(
    model: &RobotModel,
    params: &GaitParams,
    scenario: &Scenario,
) -> Result<CaseStudy> {
    model.validate()?;
    params.validate_stairs(model)?;
    if scenario.stair_count == 0 || scenario.stair_count % 2 != 0 {
        return Err(GaitError::param(
            "stair_count",
            format!(
                "must be a positive even number, got {}",
                scenario.stair_count
            ),
        ));
    }
    let lambda = footprint_spacing(params);
    let (w, h) = (params.stair_width, params.stair_height);
    let flight_cycles = scenario.stair_count / 2;
    let slope_rise = lambda * h / w;

    let start_body = Pose::new(Vector3::new(0.0, 0.0, model.body_height), 0.0);
    let initial = RobotState::from_config(start_body, &model.initial_configuration());
    let x_s = lambda * scenario.level_cycles as f64 + w / 2.0;
    let ascent = StairProfile::ascending(Vector2::new(x_s, 0.0), 0.0, scenario.stair_count, w, h);
    let mut b = Builder {
        model,
        params,
        terrain: Terrain::single(ascent),
        timeline: Timeline::new(initial, params.t_0),
        stages: Vec::new(),
    };

    b.wave_transition("wave transition")?;
    b.walk("level walk", scenario.level_cycles, 0.0, Phase::Walk)?;
    let ascent_start = b.timeline.t_end();
    b.walk("ascent", flight_cycles, slope_rise, Phase::Ascent)?;
    let ascent_cycle_times: Vec<f64> = (0..=flight_cycles)
        .map(|k| ascent_start + k as f64 * params.cycle_time)
        .collect();
    let landing = x_s + (scenario.stair_count - 1) as f64 * w;
    let n = cycles_past(b.state().body.position.x, landing, reach(model), lambda);
    b.walk("landing walk", n, 0.0, Phase::Walk)?;

    let centres = model.initial_configuration();
    b.relocate("reset", &centres, Phase::Reset)?;
    let (cycles, phi) = spin_cycles_for(model, params, scenario.spin_target)?;
    let schedule = SpinSchedule::new(model, params, scenario.spin_direction, phi)?;
    b.relocate(
        "spin transition",
        &schedule.desired_config(model)?,
        Phase::Transition,
    )?;
    let part = spin_timeline(
        model,
        params,
        &schedule,
        &b.state(),
        b.timeline.t_end(),
        cycles,
    )?;
    b.add("spin", part)?;
    b.relocate("reset", &centres, Phase::Reset)?;
    b.wave_transition("wave transition")?;

    // The descent flight starts half a tread ahead of where the body will be
    // after one more cycle, mirroring the ascent set-up.
    let body = b.state().body;
    let heading = body.heading();
    let top = ascent.base_height + ascent.rise();
    let origin = body.position.xy() + heading * (lambda + w / 2.0);
    let descent = StairProfile::descending(origin, body.yaw, scenario.stair_count, w, h, top);
    b.terrain = b.terrain.clone().with(descent);
    b.walk("approach", 1, 0.0, Phase::Walk)?;
    b.walk("descent", flight_cycles, -slope_rise, Phase::Descent)?;
    let bottom = (scenario.stair_count - 1) as f64 * w;
    let n = cycles_past(
        descent.along(&b.state().body.position.xy()),
        bottom,
        reach(model),
        lambda,
    );
    b.walk("exit walk", n, 0.0, Phase::Walk)?;

    let trace = simulate(&b.timeline, model, &b.terrain, scenario.dt)?;
    Ok(CaseStudy {
        timeline: b.timeline,
        terrain: b.terrain,
        ascent,
        descent,
        stages: b.stages,
        ascent_cycle_times,
        trace,
    })
}
