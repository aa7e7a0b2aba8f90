use std::fmt;

use crate::gait::LegId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which servo-driven joint a limit violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joint {
    Hip,
    Knee,
    Effector,
}

impl fmt::Display for Joint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Joint::Hip => "hip",
            Joint::Knee => "knee",
            Joint::Effector => "effector",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target ({x:.6}, {y:.6}) m is outside the reachable workspace")]
    Unreachable { x: f64, y: f64 },

    #[error("{joint} angle {angle:.6} rad is outside servo limits [{min:.6}, {max:.6}]")]
    JointLimit {
        joint: Joint,
        angle: f64,
        min: f64,
        max: f64,
    },

    #[error("stroke leaves only {margin:.6} m of workspace margin (need {required:.6} m)")]
    StrokeTooLong { margin: f64, required: f64 },

    #[error("speed {speed:.4} m/s is below the pivot momentum threshold {threshold:.4} m/s")]
    NoMomentum { speed: f64, threshold: f64 },

    #[error("schedule is unstable at t = {t:.3} s (margin {margin:.6} m)")]
    UnstablePhase { t: f64, margin: f64 },

    #[error("infeasible: {}", .reasons.join("; "))]
    Infeasible { reasons: Vec<String> },

    #[error(
        "cord height {cord_height:.4} m is not below the skate lift height {lift_height:.4} m"
    )]
    CordTooHigh { cord_height: f64, lift_height: f64 },

    #[error(
        "incline {incline:.4} rad exceeds the steepest standable incline {max_incline:.4} rad"
    )]
    InclineTooSteep { incline: f64, max_incline: f64 },

    #[error("leg {leg:?}: {source}")]
    Leg {
        leg: LegId,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn on_leg(self, leg: LegId) -> Error {
        match self {
            e @ Error::Leg { .. } => e,
            e => Error::Leg {
                leg,
                source: Box::new(e),
            },
        }
    }

    /// Strips the per-leg wrapper, if any.
    pub fn root(&self) -> &Error {
        match self {
            Error::Leg { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors that mean "the request is well-formed but physically
    /// impossible or unsafe" as opposed to bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self.root(),
            Error::Unreachable { .. }
                | Error::JointLimit { .. }
                | Error::StrokeTooLong { .. }
                | Error::NoMomentum { .. }
                | Error::UnstablePhase { .. }
                | Error::Infeasible { .. }
                | Error::CordTooHigh { .. }
                | Error::InclineTooSteep { .. }
        )
    }
}
