//! Continuous wave gait on level ground and stairs.
//!
//! Legs swing in the order 1–4–2–3 at phases 0, T/4, T/2, 3T/4. The body
//! advances one footprint spacing `λ = R/β` per cycle along its heading and,
//! on stairs, rises or drops `λ·H/W` per cycle with the body kept level.
//! Swing feet follow the quintic profiles of [`crate::swing`] in a ground
//! frame aligned with the heading.

use nalgebra::{Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::model::{FootholdConfig, Leg, Pose, RobotModel, RobotState, WORKSPACE_TOL};
use crate::stability::state_margin;
use crate::swing::{smoothstep, swing_clearance, terrain_swing};
use crate::terrain::{StairProfile, Terrain};
use crate::timeline::{BodyMotion, Phase, Profile, SwingFrame, SwingRecord, Timeline};

/// Swing order over one cycle.
pub const WAVE_SEQUENCE: [Leg; 4] = [
    Leg::LeftFront,
    Leg::RightRear,
    Leg::RightFront,
    Leg::LeftRear,
];

/// Sampling step (s) used to verify stair clearance while planning.
pub const CLEARANCE_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitParams {
    /// Duty factor β.
    pub beta: f64,
    /// Cycle time T (s).
    pub cycle_time: f64,
    /// Leg stroke R (m).
    pub stroke: f64,
    /// Swing clearance Δh (m).
    pub delta_h: f64,
    /// Stair tread length W (m).
    pub stair_width: f64,
    /// Stair riser height H (m).
    pub stair_height: f64,
    /// Gait start time t₀ (s).
    pub t_0: f64,
}

impl GaitParams {
    /// Reference gait and stair values with the minimum stair stroke `R = 2Wβ`.
    pub fn reference() -> Self {
        let (beta, w) = (0.75, 0.5);
        GaitParams {
            beta,
            cycle_time: 8.0,
            stroke: 2.0 * w * beta,
            delta_h: 0.02,
            stair_width: w,
            stair_height: 0.13,
            t_0: 0.0,
        }
    }

    pub fn swing_time(&self) -> f64 {
        (1.0 - self.beta) * self.cycle_time
    }

    pub fn validate(&self, model: &RobotModel) -> Result<()> {
        if !(self.beta >= 0.75 && self.beta < 1.0) {
            return Err(GaitError::param(
                "beta",
                format!("must lie in [3/4, 1), got {}", self.beta),
            ));
        }
        let positive = [
            ("cycle_time", self.cycle_time),
            ("stroke", self.stroke),
            ("delta_h", self.delta_h),
            ("stair_width", self.stair_width),
            ("stair_height", self.stair_height),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GaitError::param(name, format!("must be positive, got {v}")));
            }
        }
        if !self.t_0.is_finite() {
            return Err(GaitError::param("t_0", "must be finite"));
        }
        if self.stroke > model.r_x + 1e-12 {
            return Err(GaitError::Infeasible(format!(
                "stroke R = {} exceeds the workspace length r_x = {}",
                self.stroke, model.r_x
            )));
        }
        Ok(())
    }

    /// Stair-gait requirements on top of [`GaitParams::validate`].
    pub fn validate_stairs(&self, model: &RobotModel) -> Result<()> {
        self.validate(model)?;
        let (h, v) = min_stroke(self);
        if self.stroke < h - 1e-12 {
            return Err(GaitError::Infeasible(format!(
                "stroke R = {} is below the minimum 2Wβ = {h} (workspace r_x = {})",
                self.stroke, model.r_x
            )));
        }
        if model.r_z < v - 1e-12 {
            return Err(GaitError::Infeasible(format!(
                "vertical reach r_z = {} is below the minimum 2Hβ = {v}",
                model.r_z
            )));
        }
        Ok(())
    }
}

/// Footprint spacing `λ = R/β`.
pub fn footprint_spacing(params: &GaitParams) -> f64 {
    params.stroke / params.beta
}

/// Minimum stair stroke `(2Wβ, 2Hβ)`.
pub fn min_stroke(params: &GaitParams) -> (f64, f64) {
    (
        2.0 * params.stair_width * params.beta,
        2.0 * params.stair_height * params.beta,
    )
}

/// Lift time of `leg` as a fraction of the cycle.
pub fn lift_phase(leg: Leg) -> f64 {
    let k = WAVE_SEQUENCE.iter().position(|&l| l == leg).unwrap_or(0);
    k as f64 / 4.0
}

/// Starting footholds: each foot reaches the rear end of its stroke exactly
/// at its lift time while the body moves at `λ/T`.
pub fn desired_wave_config(model: &RobotModel, params: &GaitParams) -> Result<FootholdConfig> {
    let r = params.stroke;
    let lambda = footprint_spacing(params);
    let config = FootholdConfig::from_fn(|leg| {
        let c = model.workspace_center(leg);
        Vector3::new(c.x - r / 2.0 + lambda * lift_phase(leg), c.y, c.z)
    });
    config.validate(model)?;
    Ok(config)
}

/// Largest constant-speed weight κ of the body profile inside a swing such
/// that the swing foot never leaves the stroke by more than the spare
/// workspace length `(r_x − R)/2`. Returns 1 when constant speed fits.
pub fn blend_kappa(model: &RobotModel, params: &GaitParams) -> f64 {
    let lambda = footprint_spacing(params);
    let q = 1.0 - params.beta;
    let slack = ((model.r_x - params.stroke) / 2.0 - 1e-9).max(0.0);
    let overshoot = |kappa: f64| {
        // Body-frame lag of the swing foot behind its liftoff point; the
        // lead past touchdown is its mirror image.
        let a = 1.0 - q * (1.0 - kappa);
        (0..=2000)
            .map(|i| {
                let tau = i as f64 / 4000.0;
                q * kappa * tau - a * smoothstep(tau)
            })
            .fold(0.0, f64::max)
            * lambda
    };
    if overshoot(1.0) <= slack {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if overshoot(mid) <= slack {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn swing_profile(model: &RobotModel, params: &GaitParams) -> Profile {
    let kappa = blend_kappa(model, params);
    if kappa >= 1.0 {
        Profile::Linear
    } else {
        Profile::Blend { kappa }
    }
}

/// Wave-gait cycles from `start`, which must hold the desired configuration
/// in the horizontal plane. The body heads along its yaw and changes height
/// by `rise` per cycle.
#[allow(clippy::too_many_arguments)]
pub fn wave_cycles(
    model: &RobotModel,
    params: &GaitParams,
    terrain: &Terrain,
    start: &RobotState,
    t_start: f64,
    n_cycles: usize,
    rise: f64,
    phase: Phase,
) -> Result<Timeline> {
    params.validate(model)?;
    let desired = desired_wave_config(model, params)?;
    for leg in Leg::ALL {
        let d = (start.foot_body(leg).xy() - desired.get(leg).xy()).norm();
        if d > 1e-9 {
            return Err(GaitError::Infeasible(format!(
                "leg {leg} starts {d:.3e} m away from the wave-gait configuration"
            )));
        }
    }
    let lambda = footprint_spacing(params);
    let t = params.cycle_time;
    let t_sw = params.swing_time();
    let gap = t / 4.0 - t_sw;
    let heading = start.body.heading();
    let velocity = Vector3::new(heading.x * lambda, heading.y * lambda, rise) / t;
    let profile = swing_profile(model, params);

    let mut tl = Timeline::new(*start, t_start);
    for _ in 0..n_cycles {
        for leg in WAVE_SEQUENCE {
            let cur = *tl.final_state();
            let lift = cur.foot(leg).position;
            let xy = lift.xy() + heading * lambda;
            let target = Vector3::new(xy.x, xy.y, terrain.height_at(&xy));
            let sw = terrain_swing(&lift, &target, t_sw, params.delta_h, terrain)?;
            let clr = swing_clearance(&lift, sw.yaw, &sw.spec, sw.t_s, terrain, CLEARANCE_DT)?;
            if clr.interior_min <= 0.0 || clr.min < -1e-9 {
                return Err(GaitError::Infeasible(format!(
                    "swing of leg {leg} from {lift:?} collides with the stairs (clearance {:.3e} m at t = {:.3} s)",
                    clr.interior_min, clr.interior_t
                )));
            }
            let rec = SwingRecord::new(
                leg,
                &cur,
                sw.spec,
                sw.t_s,
                SwingFrame::Ground { yaw: sw.yaw },
            );
            tl.push(
                t_sw,
                BodyMotion::translate(velocity * t_sw, profile),
                Some(rec),
                phase,
            )?;
            check_swing_end(model, tl.final_state(), leg)?;
            if gap > 0.0 {
                tl.push(
                    gap,
                    BodyMotion::translate(velocity * gap, Profile::Linear),
                    None,
                    phase,
                )?;
            }
        }
    }
    Ok(tl)
}

fn check_swing_end(model: &RobotModel, state: &RobotState, leg: Leg) -> Result<()> {
    let (worst, excess) = model.workspace_excess(state);
    if excess > WORKSPACE_TOL {
        return Err(GaitError::InfeasibleState { leg: worst, excess });
    }
    // The tripod margin shrinks monotonically during a swing, so its value
    // at touchdown bounds the whole swing.
    let mut tripod = *state;
    tripod.foot_mut(leg).support = false;
    let m = state_margin(&tripod)?;
    if m < 0.0 {
        return Err(GaitError::Infeasible(format!(
            "CoM leaves the support triangle during the swing of leg {leg} (margin {m:.3e} m)"
        )));
    }
    Ok(())
}

/// All feet on the terrain at the desired configuration under `body`.
pub fn wave_start_state(
    model: &RobotModel,
    params: &GaitParams,
    terrain: &Terrain,
    body: Pose,
) -> Result<RobotState> {
    let desired = desired_wave_config(model, params)?;
    let mut s = RobotState::from_config(body, &desired);
    for foot in s.feet.iter_mut() {
        foot.position.z = terrain.height_at(&foot.position.xy());
    }
    let (leg, excess) = model.workspace_excess(&s);
    if excess > WORKSPACE_TOL {
        return Err(GaitError::InfeasibleState { leg, excess });
    }
    Ok(s)
}

/// Level walking along +x from the origin.
pub fn plan_level_walk(
    model: &RobotModel,
    params: &GaitParams,
    n_cycles: usize,
) -> Result<Timeline> {
    let terrain = Terrain::flat();
    let body = Pose::new(Vector3::new(0.0, 0.0, model.body_height), 0.0);
    let start = wave_start_state(model, params, &terrain, body)?;
    wave_cycles(
        model,
        params,
        &terrain,
        &start,
        params.t_0,
        n_cycles,
        0.0,
        Phase::Walk,
    )
}

/// Start pose for a flight: half a tread before the first riser, facing up
/// or down the flight, at body height above the flight's base.
pub fn flight_start_pose(model: &RobotModel, stairs: &StairProfile) -> Pose {
    let back: Vector2<f64> = stairs.origin - stairs.direction() * (stairs.width / 2.0);
    Pose::new(
        Vector3::new(back.x, back.y, stairs.base_height + model.body_height),
        stairs.heading,
    )
}

fn plan_flight(
    model: &RobotModel,
    params: &GaitParams,
    stairs: &StairProfile,
    n_cycles: usize,
    ascending: bool,
) -> Result<Timeline> {
    stairs.validate()?;
    if stairs.ascending != ascending {
        return Err(GaitError::param(
            "stairs",
            if ascending {
                "expected an ascending flight"
            } else {
                "expected a descending flight"
            },
        ));
    }
    params.validate_stairs(model)?;
    let terrain = Terrain::single(*stairs);
    let start = wave_start_state(model, params, &terrain, flight_start_pose(model, stairs))?;
    let slope = stairs.height / stairs.width;
    let rise = footprint_spacing(params) * slope * if ascending { 1.0 } else { -1.0 };
    let phase = if ascending {
        Phase::Ascent
    } else {
        Phase::Descent
    };
    wave_cycles(
        model, params, &terrain, &start, params.t_0, n_cycles, rise, phase,
    )
}

/// Leveled-body climb up `stairs`, two treads per leg per cycle.
pub fn plan_stair_ascent(
    model: &RobotModel,
    params: &GaitParams,
    stairs: &StairProfile,
    n_cycles: usize,
) -> Result<Timeline> {
    plan_flight(model, params, stairs, n_cycles, true)
}

/// Leveled-body descent of `stairs`, two treads per leg per cycle.
pub fn plan_stair_descent(
    model: &RobotModel,
    params: &GaitParams,
    stairs: &StairProfile,
    n_cycles: usize,
) -> Result<Timeline> {
    plan_flight(model, params, stairs, n_cycles, false)
}
