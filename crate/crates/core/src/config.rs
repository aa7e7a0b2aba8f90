//! TOML configuration.
//!
//! Every section and field is optional; omitted values take their defaults.
//! Unknown keys are rejected so typos do not go unnoticed.
//!
//! ```toml
//! config_version = 1
//!
//! [geometry]
//! sphere_radius = 0.1
//!
//! [coast]
//! decay_rate = 3.2
//!
//! [gait.skate]
//! lift_height = 0.04
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{
    build_scoot, build_shuffle, build_skate, maneuver_pivot, Direction, GaitContext, GaitSettings,
    PivotManeuver, SkateParams, StrokeParams,
};
use crate::kinematics::{JointLimits, RobotGeometry};
use crate::sequences::StairSettings;
use crate::sim::CoastModel;
use crate::stability::MassModel;

pub const CONFIG_VERSION: u32 = 1;

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "TRIPOD_CONFIG";

/// Maps a joint angle onto the 0–180° range of a hobby servo:
/// `servo = offset + direction * degrees(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServoChannel {
    pub offset_deg: f64,
    pub direction: i8,
}

impl ServoChannel {
    pub fn to_servo(&self, q: f64) -> f64 {
        self.offset_deg + f64::from(self.direction) * q.to_degrees()
    }

    pub fn to_joint(&self, deg: f64) -> f64 {
        ((deg - self.offset_deg) * f64::from(self.direction)).to_radians()
    }

    /// Joint range that maps into [0°, 180°].
    pub fn joint_range(&self) -> (f64, f64) {
        let (a, b) = (self.to_joint(0.0), self.to_joint(SERVO_RANGE_DEG));
        (a.min(b), a.max(b))
    }
}

pub const SERVO_RANGE_DEG: f64 = 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServoCalibration {
    pub hip: ServoChannel,
    pub knee: ServoChannel,
    /// Effector servo positions for the two contact modes (deg).
    pub effector_rolling_deg: f64,
    pub effector_frictional_deg: f64,
}

impl Default for ServoCalibration {
    fn default() -> Self {
        ServoCalibration {
            hip: ServoChannel {
                offset_deg: 90.0,
                direction: 1,
            },
            knee: ServoChannel {
                offset_deg: 180.0,
                direction: 1,
            },
            effector_rolling_deg: 45.0,
            effector_frictional_deg: 135.0,
        }
    }
}

impl ServoCalibration {
    pub fn joint_limits(&self) -> JointLimits {
        JointLimits {
            hip: self.hip.joint_range(),
            knee: self.knee.joint_range(),
        }
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, ch) in [("servo.hip", self.hip), ("servo.knee", self.knee)] {
            if ch.direction != 1 && ch.direction != -1 {
                v.push(format!(
                    "{name}.direction must be 1 or -1 (got {})",
                    ch.direction
                ));
            }
            if !(ch.offset_deg.is_finite() && (0.0..=SERVO_RANGE_DEG).contains(&ch.offset_deg)) {
                v.push(format!(
                    "{name}.offset_deg must be in [0, 180] (got {})",
                    ch.offset_deg
                ));
            }
        }
        for (name, d) in [
            ("servo.effector_rolling_deg", self.effector_rolling_deg),
            (
                "servo.effector_frictional_deg",
                self.effector_frictional_deg,
            ),
        ] {
            if !(d.is_finite() && (0.0..=SERVO_RANGE_DEG).contains(&d)) {
                v.push(format!("{name} must be in [0, 180] (got {d})"));
            }
        }
        let k = self.knee.joint_range();
        if k.0 < -std::f64::consts::PI - 1e-9 || k.1 > 1e-9 {
            v.push(format!(
                "servo.knee maps to [{:.1}°, {:.1}°]; the elbow-up knee needs a range inside [-180°, 0°]",
                k.0.to_degrees(),
                k.1.to_degrees()
            ));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitConfig {
    pub settings: GaitSettings,
    pub scoot: StrokeParams,
    pub shuffle: StrokeParams,
    pub skate: SkateParams,
    pub pivot: PivotManeuver,
}

impl Default for GaitConfig {
    fn default() -> Self {
        GaitConfig {
            settings: GaitSettings::default(),
            scoot: StrokeParams::scoot_default(),
            shuffle: StrokeParams::shuffle_default(),
            skate: SkateParams::default(),
            pivot: PivotManeuver::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub config_version: u32,
    pub geometry: RobotGeometry,
    pub mass: MassModel,
    pub coast: CoastModel,
    pub gait: GaitConfig,
    pub servo: ServoCalibration,
    pub stairs: StairSettings,
}

impl Default for RobotConfig {
    fn default() -> Self {
        RobotConfig {
            config_version: CONFIG_VERSION,
            geometry: RobotGeometry::default(),
            mass: MassModel::default(),
            coast: CoastModel::default(),
            gait: GaitConfig::default(),
            servo: ServoCalibration::default(),
            stairs: StairSettings::default(),
        }
    }
}

impl RobotConfig {
    pub fn context(&self) -> GaitContext {
        GaitContext {
            geometry: self.geometry,
            limits: self.servo.joint_limits(),
            settings: self.gait.settings,
        }
    }

    /// Every violated invariant, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.config_version != CONFIG_VERSION {
            v.push(format!(
                "config_version {} is not supported (expected {CONFIG_VERSION})",
                self.config_version
            ));
        }
        let servo = self.servo.violations();
        let servo_ok = servo.is_empty();
        v.extend(servo);
        let geom = self.geometry.violations(&self.servo.joint_limits());
        let geom_ok = geom.is_empty();
        v.extend(geom);
        v.extend(self.mass.violations());
        v.extend(self.coast.violations());
        let s = &self.gait.settings;
        for (name, x) in [
            ("gait.settings.tick", s.tick),
            ("gait.settings.hold_duration", s.hold_duration),
        ] {
            if !(x.is_finite() && x > 0.0) {
                v.push(format!("{name} must be positive (got {x})"));
            }
        }
        for (name, x) in [
            ("gait.settings.transition_time", s.transition_time),
            ("gait.settings.safety_margin", s.safety_margin),
            ("gait.settings.max_body_roll", s.max_body_roll),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                v.push(format!("{name} must be non-negative (got {x})"));
            }
        }
        // Gait parameters are only meaningful on a valid robot.
        if geom_ok && servo_ok && v.is_empty() {
            let ctx = self.context();
            let checks = [
                (
                    "gait.scoot",
                    build_scoot(&self.gait.scoot, Direction::Forward, &ctx).err(),
                ),
                (
                    "gait.shuffle",
                    build_shuffle(&self.gait.shuffle, Direction::Forward, &ctx).err(),
                ),
                (
                    "gait.skate",
                    build_skate(&self.gait.skate, Direction::Forward, &ctx).err(),
                ),
                ("gait.pivot", maneuver_pivot(&self.gait.pivot, &ctx).err()),
            ];
            for (name, err) in checks {
                if let Some(e) = err {
                    v.push(format!("{name}: {e}"));
                }
            }
        }
        let st = &self.stairs;
        for (name, x) in [
            ("stairs.clearance", st.clearance),
            ("stairs.step_duration", st.step_duration),
            ("stairs.cage_half_width", st.cage_half_width),
            ("stairs.front_reach", st.front_reach),
            ("stairs.plant_radius", st.plant_radius),
        ] {
            if !(x.is_finite() && x > 0.0) {
                v.push(format!("{name} must be positive (got {x})"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn from_toml(text: &str) -> Result<RobotConfig> {
        let cfg: RobotConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<RobotConfig> {
    let text = std::fs::read_to_string(path)?;
    RobotConfig::from_toml(&text)
}

pub fn save_config(cfg: &RobotConfig, path: &Path) -> Result<()> {
    std::fs::write(path, cfg.to_toml())?;
    Ok(())
}

/// Explicit path first, then `TRIPOD_CONFIG`.
pub fn resolve_config_path(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}
