use thiserror::Error;

use crate::model::Leg;

pub type Result<T> = std::result::Result<T, GaitError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    /// A parameter violates its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown leg id {0} (expected 1..=4)")]
    UnknownLeg(u8),

    /// A foot lies outside its workspace box by more than the tolerance.
    #[error("leg {leg} is outside its workspace by {excess:.3e} m")]
    InfeasibleState { leg: Leg, excess: f64 },

    #[error("no foot is in ground contact")]
    NoSupport,

    #[error("time {t} is outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    /// A planner could not satisfy its geometric constraints.
    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error("malformed timeline: {0}")]
    MalformedTimeline(String),
}

impl GaitError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        GaitError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that mean "the requested motion cannot be planned"
    /// as opposed to bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            GaitError::Infeasible(_) | GaitError::InfeasibleState { .. }
        )
    }
}
