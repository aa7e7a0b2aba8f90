//! CSV and key-value exports.
//!
//! All writers produce comma-separated text with a header row, `.` as the
//! decimal separator and LF line endings, with fixed precision per column
//! so identical inputs give identical bytes.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::config::{ServoCalibration, ServoChannel, SERVO_RANGE_DEG};
use crate::error::{Error, Joint, Result};
use crate::gait::{ContactMode, GaitSchedule, LegId};
use crate::kinematics::JointAngles;
use crate::sequences::{CordSequence, StairSequence, StepAction};
use crate::sim::Trajectory;

pub const SERVO_HEADER: &str = "t_ms,leg,joint,angle_deg,contact_mode";
pub const TRAJECTORY_HEADER: &str = "t,x,y,heading,orientation,speed,support,margin,n_contacts";

/// Export resolution of servo angles (deg).
pub const SERVO_QUANTUM_DEG: f64 = 0.1;

fn quantize(deg: f64) -> f64 {
    let q = (deg / SERVO_QUANTUM_DEG).round() * SERVO_QUANTUM_DEG;
    // Avoid printing "-0.0".
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

fn servo_deg(q: f64, ch: &ServoChannel, joint: Joint) -> Result<f64> {
    let deg = ch.to_servo(q);
    if !(-1e-9..=SERVO_RANGE_DEG + 1e-9).contains(&deg) {
        let (min, max) = ch.joint_range();
        return Err(Error::JointLimit {
            joint,
            angle: q,
            min,
            max,
        });
    }
    Ok(quantize(deg.clamp(0.0, SERVO_RANGE_DEG)))
}

fn effector_deg(mode: ContactMode, cal: &ServoCalibration) -> f64 {
    match mode {
        ContactMode::Rolling => cal.effector_rolling_deg,
        ContactMode::Frictional => cal.effector_frictional_deg,
    }
}

/// Appends the nine channel rows of one instant.
fn push_rows(
    out: &mut String,
    t: f64,
    angles: &[JointAngles; 3],
    modes: &[ContactMode; 3],
    cal: &ServoCalibration,
) -> Result<()> {
    let t_ms = (t * 1000.0).round() as i64;
    for leg in LegId::ALL {
        let i = leg.index();
        let mode = modes[i].name();
        let hip = servo_deg(angles[i].q1, &cal.hip, Joint::Hip).map_err(|e| e.on_leg(leg))?;
        let knee = servo_deg(angles[i].q2, &cal.knee, Joint::Knee).map_err(|e| e.on_leg(leg))?;
        let eff = quantize(effector_deg(modes[i], cal));
        let name = leg.name();
        writeln!(out, "{t_ms},{name},hip,{hip:.1},{mode}").unwrap();
        writeln!(out, "{t_ms},{name},knee,{knee:.1},{mode}").unwrap();
        writeln!(out, "{t_ms},{name},effector,{eff:.1},{mode}").unwrap();
    }
    Ok(())
}

fn schedule_rows(
    out: &mut String,
    g: &GaitSchedule,
    t0: f64,
    cal: &ServoCalibration,
) -> Result<()> {
    for t in g.tick_times() {
        let s = g.sample(t);
        let angles = g.joint_angles_of(&s)?;
        let modes = std::array::from_fn(|i| s.legs[i].contact);
        push_rows(out, t0 + t, &angles, &modes, cal)?;
    }
    Ok(())
}

/// One cycle of a schedule at the control tick:
/// `ceil(period / tick)` instants of nine channels.
pub fn export_servo_schedule(g: &GaitSchedule, cal: &ServoCalibration) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{SERVO_HEADER}").unwrap();
    schedule_rows(&mut out, g, 0.0, cal)?;
    Ok(out)
}

/// A single static pose as one servo instant.
pub fn export_pose_servo(
    angles: &[JointAngles; 3],
    modes: &[ContactMode; 3],
    cal: &ServoCalibration,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{SERVO_HEADER}").unwrap();
    push_rows(&mut out, 0.0, angles, modes, cal)?;
    Ok(out)
}

/// Stair climb: joint angles interpolated linearly across each step, with
/// a `#step,<label>` marker line before each step.
pub fn export_stair_servo(
    seq: &StairSequence,
    ctx: &crate::gait::GaitContext,
    cal: &ServoCalibration,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{SERVO_HEADER}").unwrap();
    let tick = ctx.settings.tick;
    let mut from = seq.start;
    let mut t0 = 0.0;
    for step in &seq.steps {
        let StepAction::Pose(to) = step.action else {
            continue;
        };
        writeln!(out, "#step,{}", step.label).unwrap();
        let a = from.joint_angles(ctx)?;
        let b = to.joint_angles(ctx)?;
        let n = crate::gait::ticks_in(step.duration, tick);
        for k in 0..n {
            let f = k as f64 / n as f64;
            let angles = std::array::from_fn(|i| JointAngles {
                q0: a[i].q0 + (b[i].q0 - a[i].q0) * f,
                q1: a[i].q1 + (b[i].q1 - a[i].q1) * f,
                q2: a[i].q2 + (b[i].q2 - a[i].q2) * f,
            });
            let modes = std::array::from_fn(|i| to.feet[i].contact);
            push_rows(&mut out, t0 + step.duration * f, &angles, &modes, cal)?;
        }
        t0 += step.duration;
        from = to;
    }
    let end = from.joint_angles(ctx)?;
    let modes = std::array::from_fn(|i| from.feet[i].contact);
    push_rows(&mut out, t0, &end, &modes, cal)?;
    Ok(out)
}

/// Cord crossing: every gait step repeated for its strides; heading
/// changes appear as markers only.
pub fn export_cord_servo(seq: &CordSequence, cal: &ServoCalibration) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{SERVO_HEADER}").unwrap();
    let mut t0 = 0.0;
    for step in &seq.steps {
        match &step.action {
            StepAction::Gait { schedule, strides } => {
                writeln!(out, "#step,{}", step.label).unwrap();
                for _ in 0..*strides {
                    schedule_rows(&mut out, schedule, t0, cal)?;
                    t0 += schedule.period();
                }
            }
            StepAction::ChangeHeading { from, to } => {
                writeln!(
                    out,
                    "#step,{}-heading-{}-to-{}",
                    step.label,
                    from.name(),
                    to.name()
                )
                .unwrap();
            }
            StepAction::Pose(_) => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ServoRow {
    pub t_ms: i64,
    pub leg: String,
    pub joint: String,
    pub angle_deg: f64,
    pub contact_mode: String,
}

pub fn import_servo_schedule(text: &str) -> Result<Vec<ServoRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>().join(",") != SERVO_HEADER {
        return Err(Error::Parse(format!(
            "unexpected servo header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Hip and knee angles (q1, q2) of each leg at one instant.
pub type ServoInstant = (i64, [(f64, f64); 3]);

/// Joint angles per leg at each instant of an imported schedule.
pub fn rows_to_joint_angles(
    rows: &[ServoRow],
    cal: &ServoCalibration,
) -> Result<Vec<ServoInstant>> {
    let mut out: Vec<ServoInstant> = Vec::new();
    for r in rows {
        if out.last().is_none_or(|(t, _)| *t != r.t_ms) {
            out.push((r.t_ms, [(f64::NAN, f64::NAN); 3]));
        }
        let leg: LegId = r.leg.parse()?;
        let slot = &mut out.last_mut().expect("pushed above").1[leg.index()];
        match r.joint.as_str() {
            "hip" => slot.0 = cal.hip.to_joint(r.angle_deg),
            "knee" => slot.1 = cal.knee.to_joint(r.angle_deg),
            "effector" => {}
            other => return Err(Error::Parse(format!("unknown joint '{other}'"))),
        }
    }
    if out
        .iter()
        .any(|(_, a)| a.iter().any(|(h, k)| h.is_nan() || k.is_nan()))
    {
        return Err(Error::Parse("incomplete servo instant".into()));
    }
    Ok(out)
}

fn fmt_f(x: f64, prec: usize) -> String {
    let s = format!("{x:.prec$}");
    // Normalise negative zero so equal states print identically.
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    writeln!(out, "{TRAJECTORY_HEADER}").unwrap();
    for s in &traj.samples {
        let b = &s.body;
        let heading = if b.heading_defined() {
            fmt_f(b.heading, 6)
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f(s.t, 3),
            fmt_f(b.position.x, 6),
            fmt_f(b.position.y, 6),
            heading,
            fmt_f(b.orientation, 6),
            fmt_f(b.speed, 6),
            s.support.name(),
            fmt_f(s.margin, 6),
            s.contacts.len()
        )
        .unwrap();
    }
    out
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metrics {
    entries: Vec<(String, String)>,
}

impl Metrics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, fmt_f(value, 6))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}
