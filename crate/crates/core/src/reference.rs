//! Published reference figures, kept for annotating reports.
//!
//! Rows marked `own` describe this robot's gaits and are the regression
//! targets; the rest are other robots, stored for comparison only.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedRow {
    pub robot: &'static str,
    pub mode: Option<&'static str>,
    pub own: bool,
    pub speed_mps: f64,
    pub speed_blps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningRow {
    pub robot: &'static str,
    pub mode: Option<&'static str>,
    pub own: bool,
    pub radius_m: f64,
}

const fn speed(robot: &'static str, mps: f64, blps: Option<f64>) -> SpeedRow {
    SpeedRow {
        robot,
        mode: None,
        own: false,
        speed_mps: mps,
        speed_blps: blps,
    }
}

const fn own_speed(mode: &'static str, mps: f64, blps: f64) -> SpeedRow {
    SpeedRow {
        robot: "tripod",
        mode: Some(mode),
        own: true,
        speed_mps: mps,
        speed_blps: Some(blps),
    }
}

pub const MAX_SPEEDS: [SpeedRow; 8] = [
    speed("MVA Tripod", 0.01, Some(0.11)),
    own_speed("scooting", 0.16, 0.72),
    speed("STRIDER", 0.21, Some(0.11)),
    own_speed("shuffling", 0.39, 1.74),
    own_speed("skating", 0.56, 2.49),
    speed("Ballbot", 0.75, None),
    speed("Spot", 1.60, Some(1.45)),
    speed("Ascento", 2.22, None),
];

pub const TURNING_RADII: [TurningRow; 5] = [
    TurningRow {
        robot: "tripod",
        mode: Some("without rotation"),
        own: true,
        radius_m: 0.0,
    },
    TurningRow {
        robot: "tripod",
        mode: Some("pivot"),
        own: true,
        radius_m: 0.153,
    },
    TurningRow {
        robot: "Ballbot",
        mode: None,
        own: false,
        radius_m: 0.0,
    },
    TurningRow {
        robot: "Ascento",
        mode: None,
        own: false,
        radius_m: 0.36,
    },
    TurningRow {
        robot: "Spot",
        mode: None,
        own: false,
        radius_m: 0.95,
    },
];

pub fn own_speed_for(mode: &str) -> Option<&'static SpeedRow> {
    MAX_SPEEDS.iter().find(|r| r.own && r.mode == Some(mode))
}

pub fn own_radius_for(mode: &str) -> Option<&'static TurningRow> {
    TURNING_RADII.iter().find(|r| r.own && r.mode == Some(mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn own_rows_share_one_body_length() {
        for r in MAX_SPEEDS.iter().filter(|r| r.own) {
            let bl = r.speed_mps / r.speed_blps.unwrap();
            assert!((bl - 0.225).abs() < 0.005, "{r:?}");
        }
    }

    #[test]
    fn lookups() {
        assert_eq!(own_speed_for("skating").unwrap().speed_mps, 0.56);
        assert_eq!(own_radius_for("pivot").unwrap().radius_m, 0.153);
        assert!(own_speed_for("Spot").is_none());
    }
}
