//! Spinning gait about the body's vertical axis.
//!
//! Every foot moves on the circle of radius `ρ = √(P_x² + P_y²)/2` through
//! the workspace centres. A supporting foot slides backwards along the
//! circle in the body frame while the body turns at `φ/(βT)`; it is lifted
//! at the end of its usable arc and put down at the other end after a
//! straight body-frame chord.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::model::{FootholdConfig, Leg, Pose, RobotModel, RobotState, WORKSPACE_TOL};
use crate::stability::state_margin;
use crate::swing::SwingSpec;
use crate::timeline::{BodyMotion, Phase, SwingFrame, SwingRecord, Timeline};
use crate::wave::GaitParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinDirection {
    /// Counter-clockwise seen from above (+z).
    Ccw,
    Cw,
}

impl SpinDirection {
    pub fn sign(self) -> f64 {
        match self {
            SpinDirection::Ccw => 1.0,
            SpinDirection::Cw => -1.0,
        }
    }

    /// Swing order: 1–3–4–2 counter-clockwise, 1–2–4–3 clockwise.
    pub fn sequence(self) -> [Leg; 4] {
        match self {
            SpinDirection::Ccw => [
                Leg::LeftFront,
                Leg::LeftRear,
                Leg::RightRear,
                Leg::RightFront,
            ],
            SpinDirection::Cw => [
                Leg::LeftFront,
                Leg::RightFront,
                Leg::RightRear,
                Leg::LeftRear,
            ],
        }
    }
}

/// Chord geometry of the left-front leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinGeometry {
    pub rho: f64,
    /// Polar angle of the lower arc end.
    pub delta: f64,
    /// Angle between the upper arc end and the body y axis.
    pub gamma: f64,
    /// Usable arc.
    pub phi: f64,
    pub s_x: f64,
    pub s_y: f64,
    /// True when the closed forms for a circle crossing both long edges apply.
    pub closed_form: bool,
}

impl SpinGeometry {
    /// Chord endpoints (lower, upper) in the left-front leg's quadrant.
    pub fn endpoints(&self) -> (Vector2<f64>, Vector2<f64>) {
        (
            polar(self.rho, self.delta),
            polar(self.rho, self.delta + self.phi),
        )
    }
}

fn polar(r: f64, a: f64) -> Vector2<f64> {
    Vector2::new(r * a.cos(), r * a.sin())
}

pub fn spin_radius(model: &RobotModel) -> f64 {
    model.p_x.hypot(model.p_y) / 2.0
}

fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Largest arc `[lo, hi]` of the spin circle inside the workspace rectangle
/// of `leg` that contains the workspace centre. Angles are polar angles in
/// the body frame, with `lo < θ_c < hi` around the centre angle `θ_c`.
pub fn leg_arc(model: &RobotModel, leg: Leg) -> Result<(f64, f64)> {
    let rho = spin_radius(model);
    let ws = model.workspace(leg);
    let (lo_b, hi_b) = (ws.min(), ws.max());
    let c = ws.center;
    let theta_c = c.y.atan2(c.x);
    let on_rect = |p: Vector2<f64>| {
        p.x >= lo_b.x - 1e-12
            && p.x <= hi_b.x + 1e-12
            && p.y >= lo_b.y - 1e-12
            && p.y <= hi_b.y + 1e-12
    };
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    let mut consider = |theta: f64| {
        if !on_rect(polar(rho, theta)) {
            return;
        }
        let d = wrap(theta - theta_c);
        if d < 0.0 {
            below = below.max(d);
        } else if d > 0.0 {
            above = above.min(d);
        }
    };
    for x in [lo_b.x, hi_b.x] {
        if x.abs() <= rho {
            let a = (x / rho).acos();
            consider(a);
            consider(-a);
        }
    }
    for y in [lo_b.y, hi_b.y] {
        if y.abs() <= rho {
            let a = (y / rho).asin();
            consider(a);
            consider(PI - a);
        }
    }
    if !below.is_finite() || !above.is_finite() {
        return Err(GaitError::Infeasible(format!(
            "spin circle of radius {rho} does not cross the workspace of leg {leg}"
        )));
    }
    Ok((theta_c + below, theta_c + above))
}

/// Closed forms for a circle that crosses both long edges of the left-front
/// workspace. `None` when a radicand is negative or an end point falls
/// outside the rectangle.
pub fn closed_form_geometry(model: &RobotModel) -> Option<SpinGeometry> {
    let (px, py, rx, ry) = (model.p_x, model.p_y, model.r_x, model.r_y);
    let rho = spin_radius(model);
    let r5 = px * px + 2.0 * py * ry - ry * ry;
    let r6 = px * px - 2.0 * py * ry - ry * ry;
    if r5 <= 0.0 || r6 < 0.0 {
        return None;
    }
    let delta = ((py - ry) / r5.sqrt()).atan();
    let gamma = (r6.sqrt() / (py + ry)).atan();
    let phi = FRAC_PI_2 - (delta + gamma);
    let (xlo, xhi) = ((px - rx) / 2.0, (px + rx) / 2.0);
    let a = rho * delta.cos();
    let b = rho * (delta + phi).cos();
    if !(phi > 0.0) || a < xlo - 1e-12 || a > xhi + 1e-12 || b < xlo - 1e-12 || b > xhi + 1e-12 {
        return None;
    }
    Some(SpinGeometry {
        rho,
        delta,
        gamma,
        phi,
        s_x: rho * ((delta + phi).cos() - delta.cos()),
        s_y: rho * ((delta + phi).sin() - delta.sin()),
        closed_form: true,
    })
}

/// Spin chord geometry, from the closed forms when they apply and from the
/// exact circle–rectangle intersection otherwise.
pub fn spin_geometry(model: &RobotModel) -> Result<SpinGeometry> {
    model.validate()?;
    if let Some(g) = closed_form_geometry(model) {
        return Ok(g);
    }
    let rho = spin_radius(model);
    let (lo, hi) = leg_arc(model, Leg::LeftFront)?;
    let phi = hi - lo;
    Ok(SpinGeometry {
        rho,
        delta: lo,
        gamma: FRAC_PI_2 - hi,
        phi,
        s_x: rho * (hi.cos() - lo.cos()),
        s_y: rho * (hi.sin() - lo.sin()),
        closed_form: false,
    })
}

/// Body rotation during one swing: `(1/β − 1)φ`.
pub fn body_rotation_swing(params: &GaitParams, phi: f64) -> f64 {
    (1.0 / params.beta - 1.0) * phi
}

/// Body rotation during one all-support interval: `(2 − 3/(2β))φ`.
pub fn body_rotation_support(params: &GaitParams, phi: f64) -> f64 {
    (2.0 - 3.0 / (2.0 * params.beta)) * phi
}

/// Durations of the six intervals of a cycle.
pub fn cycle_intervals(params: &GaitParams) -> [f64; 6] {
    let t = params.cycle_time;
    let sw = (1.0 - params.beta) * t;
    let sup = (4.0 * params.beta - 3.0) * t / 2.0;
    [sw, sup, sw, sw, sup, sw]
}

/// Everything needed to run spin cycles with usable arc `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSchedule {
    pub direction: SpinDirection,
    pub rho: f64,
    pub phi: f64,
    /// Body yaw rate (rad/s, signed).
    pub yaw_rate: f64,
    /// Per-leg arc used by the gait, `[lo, hi]` with `hi − lo = phi`.
    pub arcs: [(f64, f64); 4],
    /// Lift time of each leg within the cycle.
    pub lift_times: [f64; 4],
}

impl SpinSchedule {
    pub fn new(
        model: &RobotModel,
        params: &GaitParams,
        direction: SpinDirection,
        phi: f64,
    ) -> Result<Self> {
        validate_spin_params(model, params)?;
        let geo = spin_geometry(model)?;
        if !(phi > 0.0 && phi <= geo.phi + 1e-12) {
            return Err(GaitError::param(
                "phi",
                format!("must lie in (0, {}], got {phi}", geo.phi),
            ));
        }
        let mut arcs = [(0.0, 0.0); 4];
        for leg in Leg::ALL {
            let (lo, hi) = leg_arc(model, leg)?;
            arcs[leg.index()] = match direction {
                SpinDirection::Ccw => (lo, lo + phi),
                SpinDirection::Cw => (hi - phi, hi),
            };
        }
        let iv = cycle_intervals(params);
        let seq = direction.sequence();
        let starts = [
            0.0,
            iv[0] + iv[1],
            iv[0] + iv[1] + iv[2],
            iv[0] + iv[1] + iv[2] + iv[3] + iv[4],
        ];
        let mut lift_times = [0.0; 4];
        for (k, leg) in seq.iter().enumerate() {
            lift_times[leg.index()] = starts[k];
        }
        Ok(SpinSchedule {
            direction,
            rho: geo.rho,
            phi,
            yaw_rate: direction.sign() * phi / (params.beta * params.cycle_time),
            arcs,
            lift_times,
        })
    }

    /// Polar angle at which `leg` is lifted.
    pub fn lift_angle(&self, leg: Leg) -> f64 {
        let (lo, hi) = self.arcs[leg.index()];
        match self.direction {
            SpinDirection::Ccw => lo,
            SpinDirection::Cw => hi,
        }
    }

    /// Polar angle at which `leg` lands.
    pub fn touchdown_angle(&self, leg: Leg) -> f64 {
        let (lo, hi) = self.arcs[leg.index()];
        match self.direction {
            SpinDirection::Ccw => hi,
            SpinDirection::Cw => lo,
        }
    }

    /// Body-frame chord travelled by `leg` during its swing.
    pub fn chord(&self, leg: Leg) -> Vector2<f64> {
        polar(self.rho, self.touchdown_angle(leg)) - polar(self.rho, self.lift_angle(leg))
    }

    /// Cycle-start footholds: each foot reaches its lift angle exactly at its
    /// lift time.
    pub fn desired_config(&self, model: &RobotModel) -> Result<FootholdConfig> {
        let config = FootholdConfig::from_fn(|leg| {
            let a = self.lift_angle(leg) + self.yaw_rate * self.lift_times[leg.index()];
            let p = polar(self.rho, a);
            Vector3::new(p.x, p.y, -model.body_height)
        });
        config.validate(model)?;
        Ok(config)
    }
}

fn validate_spin_params(model: &RobotModel, params: &GaitParams) -> Result<()> {
    if !(params.beta >= 0.75 && params.beta < 1.0) {
        return Err(GaitError::param(
            "beta",
            format!("spinning needs beta in [3/4, 1), got {}", params.beta),
        ));
    }
    if !(params.cycle_time > 0.0) {
        return Err(GaitError::param("cycle_time", "must be positive"));
    }
    if !(params.delta_h > 0.0) {
        return Err(GaitError::param("delta_h", "must be positive"));
    }
    model.validate()
}

/// Spin-gait starting footholds using the full usable arc.
pub fn desired_spin_config(
    model: &RobotModel,
    params: &GaitParams,
    direction: SpinDirection,
) -> Result<FootholdConfig> {
    let geo = spin_geometry(model)?;
    SpinSchedule::new(model, params, direction, geo.phi)?.desired_config(model)
}

/// Number of cycles and per-cycle arc that turn the body by exactly `target`.
pub fn spin_cycles_for(
    model: &RobotModel,
    params: &GaitParams,
    target: f64,
) -> Result<(usize, f64)> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(GaitError::param(
            "target_yaw",
            format!("must be positive, got {target}"),
        ));
    }
    let geo = spin_geometry(model)?;
    let per_cycle = geo.phi / params.beta;
    let n = ((target / per_cycle) - 1e-9).ceil().max(1.0) as usize;
    Ok((n, target * params.beta / n as f64))
}

/// `n` spin cycles from `start`, which must hold the schedule's desired
/// configuration.
pub fn spin_timeline(
    model: &RobotModel,
    params: &GaitParams,
    schedule: &SpinSchedule,
    start: &RobotState,
    t_start: f64,
    n: usize,
) -> Result<Timeline> {
    let desired = schedule.desired_config(model)?;
    let d = start.config().max_distance(&desired);
    if d > 1e-9 {
        return Err(GaitError::Infeasible(format!(
            "spin starts {d:.3e} m away from its desired configuration"
        )));
    }
    let iv = cycle_intervals(params);
    let seq = schedule.direction.sequence();
    let mut tl = Timeline::new(*start, t_start);
    for _ in 0..n {
        let mut k = 0;
        for (i, dur) in iv.iter().enumerate() {
            let motion = BodyMotion::rotate(schedule.yaw_rate * dur);
            if i == 1 || i == 4 {
                tl.push(*dur, motion, None, Phase::Spin)?;
                continue;
            }
            let leg = seq[k];
            k += 1;
            let cur = *tl.final_state();
            let c = schedule.chord(leg);
            let spec = SwingSpec::flat(c.x, c.y, *dur, params.delta_h);
            let rec = SwingRecord::new(leg, &cur, spec, dur / 2.0, SwingFrame::Body);
            let mut lifted = cur;
            lifted.foot_mut(leg).support = false;
            check_spin_state(model, &lifted)?;
            tl.push(*dur, motion, Some(rec), Phase::Spin)?;
            let mut landing = *tl.final_state();
            landing.foot_mut(leg).support = false;
            check_spin_state(model, &landing)?;
        }
    }
    Ok(tl)
}

fn check_spin_state(model: &RobotModel, state: &RobotState) -> Result<()> {
    let (leg, excess) = model.workspace_excess(state);
    if excess > WORKSPACE_TOL {
        return Err(GaitError::InfeasibleState { leg, excess });
    }
    let m = state_margin(state)?;
    if m < 0.0 {
        return Err(GaitError::Infeasible(format!(
            "spin loses static stability (margin {m:.3e} m)"
        )));
    }
    Ok(())
}

/// One full spin cycle from the desired configuration at the origin.
pub fn plan_spin_cycle(
    model: &RobotModel,
    params: &GaitParams,
    direction: SpinDirection,
) -> Result<Timeline> {
    let geo = spin_geometry(model)?;
    let schedule = SpinSchedule::new(model, params, direction, geo.phi)?;
    let start = spin_start_state(model, &schedule)?;
    spin_timeline(model, params, &schedule, &start, params.t_0, 1)
}

fn spin_start_state(model: &RobotModel, schedule: &SpinSchedule) -> Result<RobotState> {
    let body = Pose::new(Vector3::new(0.0, 0.0, model.body_height), 0.0);
    Ok(RobotState::from_config(
        body,
        &schedule.desired_config(model)?,
    ))
}

/// Turns the body by `target_yaw` (rad, positive) in whole cycles, all
/// scaled to the same reduced arc when the target is not a whole number of
/// full cycles.
pub fn plan_spin(
    model: &RobotModel,
    params: &GaitParams,
    target_yaw: f64,
    direction: SpinDirection,
) -> Result<Timeline> {
    let (n, phi) = spin_cycles_for(model, params, target_yaw)?;
    let schedule = SpinSchedule::new(model, params, direction, phi)?;
    let start = spin_start_state(model, &schedule)?;
    spin_timeline(model, params, &schedule, &start, params.t_0, n)
}
