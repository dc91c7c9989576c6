//! Robot geometry, frames and foot bookkeeping.
//!
//! Body frame: x forward, y left, z up, origin at the body centre, which is
//! also the centre of mass. Each leg's foot is confined to an axis-aligned
//! box (its workspace) centred below the hip at `(±p_x/2, ±p_y/2, -body_height)`.

use std::fmt;

use nalgebra::{Rotation3, Vector2, Vector3};

use crate::error::{GaitError, Result};

/// Distance (m) a foot may sit outside its workspace before a state is
/// considered infeasible.
pub const WORKSPACE_TOL: f64 = 1e-9;

/// Leg labels. Front pair is 1–2, rear pair 3–4, odd legs on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    LeftFront = 1,
    RightFront = 2,
    LeftRear = 3,
    RightRear = 4,
}

impl Leg {
    pub const ALL: [Leg; 4] = [
        Leg::LeftFront,
        Leg::RightFront,
        Leg::LeftRear,
        Leg::RightRear,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Leg> {
        match id {
            1 => Ok(Leg::LeftFront),
            2 => Ok(Leg::RightFront),
            3 => Ok(Leg::LeftRear),
            4 => Ok(Leg::RightRear),
            other => Err(GaitError::UnknownLeg(other)),
        }
    }

    /// Position in a `[_; 4]` array indexed by leg.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    /// +1 for front legs, -1 for rear legs.
    pub fn fore(self) -> f64 {
        match self {
            Leg::LeftFront | Leg::RightFront => 1.0,
            Leg::LeftRear | Leg::RightRear => -1.0,
        }
    }

    /// +1 for left legs, -1 for right legs.
    pub fn side(self) -> f64 {
        match self {
            Leg::LeftFront | Leg::LeftRear => 1.0,
            Leg::RightFront | Leg::RightRear => -1.0,
        }
    }

    /// The leg on the other side of the sagittal plane.
    pub fn mirrored(self) -> Leg {
        match self {
            Leg::LeftFront => Leg::RightFront,
            Leg::RightFront => Leg::LeftFront,
            Leg::LeftRear => Leg::RightRear,
            Leg::RightRear => Leg::LeftRear,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Leg::LeftFront => "left-front",
            Leg::RightFront => "right-front",
            Leg::LeftRear => "left-rear",
            Leg::RightRear => "right-rear",
        }
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.id(), self.name())
    }
}

/// Axis-aligned workspace box in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workspace {
    pub center: Vector3<f64>,
    pub half_extents: Vector3<f64>,
}

impl Workspace {
    pub fn min(&self) -> Vector3<f64> {
        self.center - self.half_extents
    }

    pub fn max(&self) -> Vector3<f64> {
        self.center + self.half_extents
    }

    /// Largest per-axis distance by which `p` lies outside the box (0 inside).
    pub fn excess(&self, p: &Vector3<f64>) -> f64 {
        let d = (p - self.center).abs() - self.half_extents;
        d.max().max(0.0)
    }

    pub fn contains(&self, p: &Vector3<f64>, tol: f64) -> bool {
        self.excess(p) <= tol
    }

    /// Distance from `p` along `dir` to the box boundary (ray–slab test).
    /// `p` is assumed inside; components already on a face give zero.
    pub fn ray_exit(&self, p: &Vector3<f64>, dir: &Vector3<f64>) -> f64 {
        let lo = self.min();
        let hi = self.max();
        let mut exit = f64::INFINITY;
        for axis in 0..3 {
            let d = dir[axis];
            if d > 0.0 {
                exit = exit.min((hi[axis] - p[axis]) / d);
            } else if d < 0.0 {
                exit = exit.min((lo[axis] - p[axis]) / d);
            }
        }
        exit.max(0.0)
    }
}

/// Body geometry and leg workspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotModel {
    /// Longitudinal distance between front and rear hips (m).
    pub p_x: f64,
    /// Lateral distance between left and right hips (m).
    pub p_y: f64,
    /// Workspace extents along body x, y, z (m).
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
    /// Nominal height of the body centre above the foot contact plane (m).
    pub body_height: f64,
}

impl RobotModel {
    pub fn new(p_x: f64, p_y: f64, r_x: f64, r_y: f64, r_z: f64, body_height: f64) -> Result<Self> {
        let model = RobotModel {
            p_x,
            p_y,
            r_x,
            r_y,
            r_z,
            body_height,
        };
        model.validate()?;
        Ok(model)
    }

    /// The reference robot. The vertical workspace extent and body height
    /// are chosen to cover two-tread stair climbing with a leveled body.
    pub fn reference() -> Self {
        RobotModel {
            p_x: 0.8,
            p_y: 0.54,
            r_x: 0.76,
            r_y: 0.5,
            r_z: 0.7,
            body_height: 0.6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_x", self.p_x),
            ("p_y", self.p_y),
            ("r_x", self.r_x),
            ("r_y", self.r_y),
            ("r_z", self.r_z),
            ("body_height", self.body_height),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(GaitError::param(name, format!("must be positive, got {v}")));
            }
        }
        if self.r_x >= self.p_x {
            return Err(GaitError::param(
                "r_x",
                format!(
                    "front and rear workspaces overlap: r_x = {} >= p_x = {}",
                    self.r_x, self.p_x
                ),
            ));
        }
        if self.r_y >= self.p_y {
            return Err(GaitError::param(
                "r_y",
                format!(
                    "left and right workspaces overlap: r_y = {} >= p_y = {}",
                    self.r_y, self.p_y
                ),
            ));
        }
        Ok(())
    }

    /// Hip projection of `leg` at the nominal body height (body frame).
    pub fn workspace_center(&self, leg: Leg) -> Vector3<f64> {
        Vector3::new(
            leg.fore() * self.p_x / 2.0,
            leg.side() * self.p_y / 2.0,
            -self.body_height,
        )
    }

    pub fn workspace(&self, leg: Leg) -> Workspace {
        Workspace {
            center: self.workspace_center(leg),
            half_extents: Vector3::new(self.r_x, self.r_y, self.r_z) / 2.0,
        }
    }

    /// All feet at their workspace centres.
    pub fn initial_configuration(&self) -> FootholdConfig {
        FootholdConfig::from_fn(|leg| self.workspace_center(leg))
    }

    /// Distance a foot at `foot_body` can travel along `direction` before
    /// leaving its workspace. `direction` need not be normalised.
    pub fn kinematic_margin_at(
        &self,
        leg: Leg,
        foot_body: &Vector3<f64>,
        direction: &Vector3<f64>,
    ) -> Result<f64> {
        let norm = direction.norm();
        if !(norm > 0.0) {
            return Err(GaitError::param("direction", "must be non-zero"));
        }
        let ws = self.workspace(leg);
        let excess = ws.excess(foot_body);
        if excess > WORKSPACE_TOL {
            return Err(GaitError::InfeasibleState { leg, excess });
        }
        Ok(ws.ray_exit(foot_body, &(direction / norm)))
    }

    /// Kinematic margin of `leg` in `state` along a body-frame direction.
    pub fn kinematic_margin(
        &self,
        state: &RobotState,
        leg: Leg,
        direction: &Vector3<f64>,
    ) -> Result<f64> {
        self.kinematic_margin_at(leg, &state.foot_body(leg), direction)
    }

    /// Largest workspace excess over all legs in `state` (0 when all inside).
    pub fn workspace_excess(&self, state: &RobotState) -> (Leg, f64) {
        Leg::ALL
            .iter()
            .map(|&leg| (leg, self.workspace(leg).excess(&state.foot_body(leg))))
            .fold(
                (Leg::LeftFront, 0.0),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            )
    }
}

/// World-frame body pose: position of the body centre and heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub yaw: f64,
}

impl Pose {
    pub fn new(position: Vector3<f64>, yaw: f64) -> Self {
        Pose { position, yaw }
    }

    fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vector3::z_axis(), self.yaw)
    }

    pub fn body_to_world(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * p + self.position
    }

    pub fn world_to_body(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation().inverse() * (p - self.position)
    }

    /// Rotates a body-frame direction into the world frame.
    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * v
    }

    /// Unit vector of the body x axis in the world horizontal plane.
    pub fn heading(&self) -> Vector2<f64> {
        Vector2::new(self.yaw.cos(), self.yaw.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    /// World-frame position.
    pub position: Vector3<f64>,
    /// In ground contact.
    pub support: bool,
}

/// Instantaneous kinematic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub body: Pose,
    pub feet: [Foot; 4],
}

impl RobotState {
    /// All feet supporting at `config` (body frame) under `body`.
    pub fn from_config(body: Pose, config: &FootholdConfig) -> Self {
        let feet = Leg::ALL.map(|leg| Foot {
            position: body.body_to_world(config.get(leg)),
            support: true,
        });
        RobotState { body, feet }
    }

    pub fn foot(&self, leg: Leg) -> &Foot {
        &self.feet[leg.index()]
    }

    pub fn foot_mut(&mut self, leg: Leg) -> &mut Foot {
        &mut self.feet[leg.index()]
    }

    pub fn foot_body(&self, leg: Leg) -> Vector3<f64> {
        self.body.world_to_body(&self.foot(leg).position)
    }

    pub fn config(&self) -> FootholdConfig {
        FootholdConfig::from_fn(|leg| self.foot_body(leg))
    }

    pub fn supporting(&self) -> impl Iterator<Item = Leg> + '_ {
        Leg::ALL.into_iter().filter(|&leg| self.foot(leg).support)
    }

    pub fn support_count(&self) -> usize {
        self.supporting().count()
    }

    /// Horizontal projection of the centre of mass.
    pub fn com_xy(&self) -> Vector2<f64> {
        self.body.position.xy()
    }
}

/// Four foot positions in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootholdConfig {
    pub feet: [Vector3<f64>; 4],
}

impl FootholdConfig {
    pub fn from_fn(mut f: impl FnMut(Leg) -> Vector3<f64>) -> Self {
        FootholdConfig {
            feet: Leg::ALL.map(&mut f),
        }
    }

    pub fn get(&self, leg: Leg) -> &Vector3<f64> {
        &self.feet[leg.index()]
    }

    pub fn set(&mut self, leg: Leg, p: Vector3<f64>) {
        self.feet[leg.index()] = p;
    }

    /// Checks every foot against its workspace box.
    pub fn validate(&self, model: &RobotModel) -> Result<()> {
        for leg in Leg::ALL {
            let excess = model.workspace(leg).excess(self.get(leg));
            if excess > WORKSPACE_TOL {
                return Err(GaitError::InfeasibleState { leg, excess });
            }
        }
        Ok(())
    }

    /// Largest foot displacement between two configurations.
    pub fn max_distance(&self, other: &FootholdConfig) -> f64 {
        Leg::ALL
            .iter()
            .map(|&leg| (self.get(leg) - other.get(leg)).norm())
            .fold(0.0, f64::max)
    }
}
