//! Static gait planning for a quadruped with box-shaped leg workspaces.
//!
//! The crate plans statically stable periodic gaits and replays them
//! kinematically:
//!
//! - [`wave`]: continuous wave gait on level ground and on stairs, climbing
//!   two treads per cycle with a leveled body.
//! - [`spin`]: spinning gait about the body's vertical axis.
//! - [`transition`]: stationary-body foot relocation between configurations.
//! - [`sim`]: fixed-step replay producing state, stability-margin and event
//!   traces, plus the full walk / climb / turn / descend scenario.
//!
//! Legs are point feet confined to axis-aligned boxes in the body frame; the
//! centre of mass sits at the body origin.

pub mod error;
pub mod model;
pub mod sim;
pub mod spin;
pub mod stability;
pub mod swing;
pub mod terrain;
pub mod timeline;
pub mod transition;
pub mod wave;

pub use error::{GaitError, Result};
pub use model::{FootholdConfig, Leg, Pose, RobotModel, RobotState};
pub use nalgebra::{Vector2, Vector3};
