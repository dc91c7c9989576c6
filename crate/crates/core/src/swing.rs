//! Quintic swing-foot trajectories with stair clearance.
//!
//! The horizontal path is a single rest-to-rest quintic over the swing. The
//! vertical path is two rest-to-rest quintics joined at the clearance time
//! `t_s`, where the foot passes the governing riser at `h_s + Δh`.

use nalgebra::{Rotation2, Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::terrain::Terrain;

/// Rest-to-rest quintic on [0, 1]: `10τ³ − 15τ⁴ + 6τ⁵`.
pub fn smoothstep(tau: f64) -> f64 {
    tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))
}

pub fn smoothstep_d1(tau: f64) -> f64 {
    30.0 * tau * tau * (1.0 - tau) * (1.0 - tau)
}

pub fn smoothstep_d2(tau: f64) -> f64 {
    60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingSpec {
    /// Final horizontal displacement along the swing axis (m).
    pub x_f: f64,
    /// Final lateral displacement (m).
    pub y_f: f64,
    /// Final vertical displacement (m).
    pub z_f: f64,
    /// Swing duration (s).
    pub t_sw: f64,
    /// Height of the obstacle to clear, relative to liftoff (m).
    pub h_s: f64,
    /// Horizontal distance from liftoff to the governing riser (m).
    pub d_s: f64,
    /// Clearance above `h_s` (m).
    pub delta_h: f64,
}

/// Position, velocity and acceleration relative to the liftoff point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingSample {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
}

impl SwingSpec {
    /// A ground-level swing with apex `delta_h` at mid-swing.
    pub fn flat(x_f: f64, y_f: f64, t_sw: f64, delta_h: f64) -> Self {
        SwingSpec {
            x_f,
            y_f,
            z_f: 0.0,
            t_sw,
            h_s: 0.0,
            d_s: x_f.abs() / 2.0,
            delta_h,
        }
    }

    pub fn apex(&self) -> f64 {
        self.h_s + self.delta_h
    }

    /// Checks the documented ranges. Returns advisory notes for legal but
    /// unusual specs.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.t_sw.is_finite() && self.t_sw > 0.0) {
            return Err(GaitError::param(
                "t_sw",
                format!("must be positive, got {}", self.t_sw),
            ));
        }
        if !(self.delta_h > 0.0) {
            return Err(GaitError::param(
                "delta_h",
                format!("must be positive, got {}", self.delta_h),
            ));
        }
        if !(self.h_s >= 0.0) {
            return Err(GaitError::param(
                "h_s",
                format!("must be non-negative, got {}", self.h_s),
            ));
        }
        if !(self.d_s >= 0.0 && self.d_s <= self.x_f.abs()) {
            return Err(GaitError::param(
                "d_s",
                format!(
                    "must lie in [0, |x_f|] = [0, {}], got {}",
                    self.x_f.abs(),
                    self.d_s
                ),
            ));
        }
        let mut notes = Vec::new();
        if self.z_f > self.apex() {
            notes.push(format!(
                "z_f = {} lies above the clearance apex h_s + delta_h = {}",
                self.z_f,
                self.apex()
            ));
        }
        Ok(notes)
    }

    fn check_t(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 || t > self.t_sw {
            return Err(GaitError::TimeOutOfRange {
                t,
                duration: self.t_sw,
            });
        }
        Ok(t / self.t_sw)
    }

    /// Evaluates the full 3-D swing at `t` with clearance time `t_s`.
    pub fn sample(&self, t: f64, t_s: f64) -> Result<SwingSample> {
        let tau = self.check_t(t)?;
        let s = smoothstep(tau);
        let s1 = smoothstep_d1(tau) / self.t_sw;
        let s2 = smoothstep_d2(tau) / (self.t_sw * self.t_sw);
        let (z, zd, zdd) = self.z_profile(t, t_s);
        Ok(SwingSample {
            t,
            position: Vector3::new(self.x_f * s, self.y_f * s, z),
            velocity: Vector3::new(self.x_f * s1, self.y_f * s1, zd),
            acceleration: Vector3::new(self.x_f * s2, self.y_f * s2, zdd),
        })
    }

    fn z_profile(&self, t: f64, t_s: f64) -> (f64, f64, f64) {
        let a = self.apex();
        if t <= t_s && t_s > 0.0 {
            let u = t / t_s;
            (
                a * smoothstep(u),
                a * smoothstep_d1(u) / t_s,
                a * smoothstep_d2(u) / (t_s * t_s),
            )
        } else {
            let len = self.t_sw - t_s;
            if len <= 0.0 {
                return (self.z_f, 0.0, 0.0);
            }
            let u = (t - t_s) / len;
            let dz = self.z_f - a;
            (
                a + dz * smoothstep(u),
                dz * smoothstep_d1(u) / len,
                dz * smoothstep_d2(u) / (len * len),
            )
        }
    }
}

/// Horizontal swing coordinate at time `t`.
pub fn swing_x(t: f64, spec: &SwingSpec) -> Result<f64> {
    Ok(spec.x_f * smoothstep(spec.check_t(t)?))
}

/// Vertical swing coordinate at time `t` for clearance time `t_s`.
pub fn swing_z(t: f64, t_s: f64, spec: &SwingSpec) -> Result<f64> {
    spec.check_t(t)?;
    Ok(spec.z_profile(t, t_s).0)
}

/// Time at which the horizontal coordinate reaches `d_s`.
///
/// Bisection on the monotone quintic followed by Newton polishing steps
/// that are kept only when they stay inside the bracket.
pub fn solve_ts(spec: &SwingSpec) -> Result<f64> {
    let xf = spec.x_f.abs();
    if !(xf > 0.0) {
        return Err(GaitError::param(
            "x_f",
            "clearance time needs a non-zero stroke",
        ));
    }
    if !(spec.t_sw > 0.0) {
        return Err(GaitError::param(
            "t_sw",
            format!("must be positive, got {}", spec.t_sw),
        ));
    }
    let tol = 1e-12 * xf.max(1.0);
    if spec.d_s < 0.0 || spec.d_s > xf + tol {
        return Err(GaitError::Infeasible(format!(
            "riser distance d_s = {} is outside the stroke [0, {xf}]",
            spec.d_s
        )));
    }
    let target = (spec.d_s / xf).clamp(0.0, 1.0);
    if target == 0.0 {
        return Ok(0.0);
    }
    if target == 1.0 {
        return Ok(spec.t_sw);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if smoothstep(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = smoothstep_d1(tau);
        if d <= 0.0 {
            break;
        }
        let next = tau - (smoothstep(tau) - target) / d;
        if next < lo || next > hi {
            break;
        }
        tau = next;
    }
    Ok(tau * spec.t_sw)
}

/// Minimum foot clearance over a sampled swing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clearance {
    /// Over all samples including liftoff and touchdown.
    pub min: f64,
    /// Over samples strictly inside the swing.
    pub interior_min: f64,
    /// Time of the interior minimum.
    pub interior_t: f64,
}

/// Samples the swing every `dt` (plus its end) and measures foot height
/// above the terrain. The swing axes are the world axes rotated by `yaw`.
pub fn swing_clearance(
    liftoff: &Vector3<f64>,
    yaw: f64,
    spec: &SwingSpec,
    t_s: f64,
    terrain: &Terrain,
    dt: f64,
) -> Result<Clearance> {
    if !(dt > 0.0) {
        return Err(GaitError::param(
            "dt",
            format!("must be positive, got {dt}"),
        ));
    }
    let rot = Rotation2::new(yaw);
    let n = (spec.t_sw / dt).ceil() as usize;
    let mut out = Clearance {
        min: f64::INFINITY,
        interior_min: f64::INFINITY,
        interior_t: f64::NAN,
    };
    for k in 0..=n {
        let t = (k as f64 * dt).min(spec.t_sw);
        let rel = spec.sample(t, t_s)?.position;
        let xy = liftoff.xy() + rot * Vector2::new(rel.x, rel.y);
        let c = liftoff.z + rel.z - terrain.height_at(&xy);
        out.min = out.min.min(c);
        if t > 0.0 && t < spec.t_sw && c < out.interior_min {
            out.interior_min = c;
            out.interior_t = t;
        }
    }
    Ok(out)
}

/// A swing between two footholds on the terrain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSwing {
    pub spec: SwingSpec,
    pub t_s: f64,
    /// World yaw of the swing axis.
    pub yaw: f64,
}

/// Builds the swing from `liftoff` to `target` over the terrain.
///
/// The apex height `h_s` is the highest tread along the path relative to
/// liftoff. Going up or level, `d_s` is the riser onto that tread; going
/// down, `d_s` is the last nose above the landing tread so the foot stays
/// high until it has passed it. A path without risers peaks at mid-swing.
pub fn terrain_swing(
    liftoff: &Vector3<f64>,
    target: &Vector3<f64>,
    t_sw: f64,
    delta_h: f64,
    terrain: &Terrain,
) -> Result<TerrainSwing> {
    let a = liftoff.xy();
    let b = target.xy();
    let dist = (b - a).norm();
    if !(dist > 0.0) {
        return Err(GaitError::param("target", "swing needs horizontal travel"));
    }
    let yaw = (b.y - a.y).atan2(b.x - a.x);
    let z_f = target.z - liftoff.z;
    let breaks = terrain.breakpoints_along(&a, &b);
    let mut bounds = vec![0.0];
    bounds.extend(&breaks);
    bounds.push(1.0);
    let heights: Vec<f64> = bounds
        .windows(2)
        .map(|w| terrain.height_at(&(a + (b - a) * (0.5 * (w[0] + w[1])))) - liftoff.z)
        .collect();
    let top = heights.iter().copied().fold(0.0, f64::max);
    let riser = if z_f < 0.0 {
        (1..heights.len()).rev().find(|&k| heights[k - 1] > z_f)
    } else if top > 0.0 {
        (1..heights.len()).find(|&k| heights[k] >= top)
    } else {
        None
    };
    let d_s = match riser {
        Some(k) => bounds[k] * dist,
        None => dist / 2.0,
    };
    let spec = SwingSpec {
        x_f: dist,
        y_f: 0.0,
        z_f,
        t_sw,
        h_s: top,
        d_s,
        delta_h,
    };
    let t_s = solve_ts(&spec)?;
    if !(t_s > 0.0 && t_s < t_sw) {
        return Err(GaitError::Infeasible(format!(
            "foothold at {liftoff:?} sits on a riser edge"
        )));
    }
    Ok(TerrainSwing { spec, t_s, yaw })
}
