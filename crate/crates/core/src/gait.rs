//! Periodic gait schedules and single-phase maneuvers.
//!
//! A schedule is an ordered list of phases. Each phase stores the per-leg
//! foot targets reached at its *end*; targets are linearly interpolated from
//! the previous phase's end (the last phase wraps around to the first), so
//! every schedule is periodic by construction.
//!
//! One leg is "active" and does the pushing; the two passive legs hold the
//! standing pose. A positive `body_roll` leans the body away from the active
//! leg, about the horizontal axis through the sphere contact.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{
    lean_q0, leg_ik, workspace_contains, FootTarget, JointAngles, JointLimits, RobotGeometry,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LegId {
    A,
    B,
    C,
}

impl LegId {
    pub const ALL: [LegId; 3] = [LegId::A, LegId::B, LegId::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<LegId> {
        LegId::ALL.get(i).copied()
    }

    pub fn azimuth(self, geom: &RobotGeometry) -> f64 {
        geom.leg_azimuths[self.index()]
    }

    pub fn name(self) -> &'static str {
        match self {
            LegId::A => "A",
            LegId::B => "B",
            LegId::C => "C",
        }
    }
}

impl std::str::FromStr for LegId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(LegId::A),
            "B" => Ok(LegId::B),
            "C" => Ok(LegId::C),
            other => Err(Error::InvalidParameter(format!("unknown leg '{other}'"))),
        }
    }
}

/// State of the hybrid end effector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactMode {
    /// Spherical bearing extended.
    Rolling,
    /// Bearing retracted, rubber foot on the ground.
    Frictional,
}

impl ContactMode {
    pub fn name(self) -> &'static str {
        match self {
            ContactMode::Rolling => "rolling",
            ContactMode::Frictional => "frictional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaitKind {
    Scoot,
    Skate,
    Shuffle,
    Stand,
    Brake,
    Pivot,
    Custom,
}

impl GaitKind {
    pub fn name(self) -> &'static str {
        match self {
            GaitKind::Scoot => "scoot",
            GaitKind::Skate => "skate",
            GaitKind::Shuffle => "shuffle",
            GaitKind::Stand => "stand",
            GaitKind::Brake => "brake",
            GaitKind::Pivot => "pivot",
            GaitKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    /// Active foot switches to frictional and plants.
    Plant,
    Push,
    /// Active foot switches back to rolling.
    Release,
    /// Rolling return stroke.
    Recover,
    Lift,
    /// Airborne return stroke.
    Return,
    /// Airborne foot lowered to touchdown.
    Lower,
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPhase {
    /// Foot target reached at the end of the phase.
    pub target: FootTarget,
    pub contact: ContactMode,
    pub grounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitPhase {
    pub kind: PhaseKind,
    pub duration: f64,
    pub legs: [LegPhase; 3],
    pub body_roll: f64,
    pub sphere_engaged: bool,
}

impl GaitPhase {
    /// Grounded legs plus the sphere when engaged.
    pub fn ground_contacts(&self) -> usize {
        self.legs.iter().filter(|l| l.grounded).count() + usize::from(self.sphere_engaged)
    }
}

/// Settings shared by every gait builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitSettings {
    /// Control tick (s).
    pub tick: f64,
    /// Time for the end effector to switch contact mode (s).
    pub transition_time: f64,
    /// Minimum reach margin required along every stroke (m).
    pub safety_margin: f64,
    pub max_body_roll: f64,
    /// Duration of the single phase of stand/brake schedules (s).
    pub hold_duration: f64,
}

impl Default for GaitSettings {
    fn default() -> Self {
        GaitSettings {
            tick: 0.020,
            transition_time: 0.150,
            safety_margin: 0.005,
            max_body_roll: 0.1,
            hold_duration: 1.0,
        }
    }
}

/// Everything a builder needs besides its own parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaitContext {
    pub geometry: RobotGeometry,
    pub limits: JointLimits,
    pub settings: GaitSettings,
}

impl GaitContext {
    /// Tilt seen by `leg` when the body rolls by `roll` away from `active`.
    pub fn leg_q0(&self, leg: LegId, active: LegId, roll: f64) -> f64 {
        let g = &self.geometry;
        lean_q0(leg.azimuth(g), active.azimuth(g) + PI, roll)
    }

    /// Height of the ground in leg-plane coordinates.
    pub fn ground_y(&self, sphere_lift: f64) -> f64 {
        -(self.geometry.sphere_radius + sphere_lift)
    }

    pub fn stance_target(&self, sphere_lift: f64) -> FootTarget {
        FootTarget::new(self.geometry.stance_radius, self.ground_y(sphere_lift))
    }
}

/// Parameters of the scooting and shuffling gaits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrokeParams {
    pub active_leg: LegId,
    pub stroke_length: f64,
    /// Radial position of the middle of the stroke (m).
    pub stroke_center: f64,
    pub period: f64,
    /// Duration of each contact-mode switch phase; must cover the
    /// transition time.
    pub switch_duration: f64,
    /// Share of the remaining time spent pushing; the rest is recovery.
    pub push_fraction: f64,
    pub body_roll: f64,
    /// Height the sphere is carried above the ground (shuffle only).
    pub sphere_lift: f64,
}

impl StrokeParams {
    pub fn scoot_default() -> Self {
        StrokeParams {
            active_leg: LegId::A,
            stroke_length: 0.06,
            stroke_center: 0.12,
            period: 0.80,
            switch_duration: 0.20,
            push_fraction: 0.5,
            body_roll: 0.05,
            sphere_lift: 0.0,
        }
    }

    pub fn shuffle_default() -> Self {
        StrokeParams {
            period: 0.64,
            sphere_lift: 0.02,
            ..StrokeParams::scoot_default()
        }
    }
}

impl Default for StrokeParams {
    fn default() -> Self {
        StrokeParams::scoot_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkateParams {
    pub active_leg: LegId,
    pub stroke_length: f64,
    pub stroke_center: f64,
    pub lift_height: f64,
    pub period: f64,
    /// Share of the period spent off the ground (lift, return, lower).
    pub coast_fraction: f64,
    pub body_roll: f64,
}

impl Default for SkateParams {
    fn default() -> Self {
        SkateParams {
            active_leg: LegId::A,
            stroke_length: 0.06,
            stroke_center: 0.12,
            lift_height: 0.03,
            period: 0.40,
            coast_fraction: 0.7,
            body_roll: 0.08,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GaitSpec {
    Scoot(StrokeParams),
    Shuffle(StrokeParams),
    Skate(SkateParams),
}

/// Foot sample of one leg at an instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegSample {
    pub target: FootTarget,
    /// Effective contact mode; the previous mode while a switch is under way.
    pub contact: ContactMode,
    pub in_transition: bool,
    pub grounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSample {
    pub phase: usize,
    pub legs: [LegSample; 3],
    pub body_roll: f64,
    pub sphere_engaged: bool,
}

/// Immutable periodic schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitSchedule {
    kind: GaitKind,
    direction: Direction,
    active_leg: LegId,
    phases: Vec<GaitPhase>,
    ctx: GaitContext,
    spec: Option<GaitSpec>,
}

impl GaitSchedule {
    /// Builds a custom schedule from raw phases. Checks durations, roll
    /// bounds and reachability of every sampled target; stability is left to
    /// the stability checker.
    pub fn from_phases(
        active_leg: LegId,
        direction: Direction,
        phases: Vec<GaitPhase>,
        ctx: GaitContext,
    ) -> Result<GaitSchedule> {
        let g = GaitSchedule {
            kind: GaitKind::Custom,
            direction,
            active_leg,
            phases,
            ctx,
            spec: None,
        };
        g.validate(None)?;
        Ok(g)
    }

    fn validate(&self, required_margin: Option<f64>) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::InvalidParameter("schedule has no phases".into()));
        }
        let max_roll = self.ctx.settings.max_body_roll;
        for p in &self.phases {
            if !(p.duration.is_finite() && p.duration > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "phase duration must be positive (got {})",
                    p.duration
                )));
            }
            if !p.body_roll.is_finite() || p.body_roll.abs() > max_roll + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "body roll {} exceeds the configured maximum {max_roll}",
                    p.body_roll
                )));
            }
        }
        for t in self.check_times() {
            let s = self.sample(t);
            for leg in LegId::ALL {
                let q0 = self.ctx.leg_q0(leg, self.active_leg, s.body_roll);
                let target = s.legs[leg.index()].target;
                let reach = workspace_contains(target, q0, &self.ctx.geometry, &self.ctx.limits);
                if !reach.contained {
                    return Err(
                        match leg_ik(target, q0, &self.ctx.geometry, &self.ctx.limits) {
                            Err(e) => e.on_leg(leg),
                            Ok(_) => Error::Unreachable {
                                x: target.x,
                                y: target.y,
                            }
                            .on_leg(leg),
                        },
                    );
                }
                if let Some(required) = required_margin {
                    if leg == self.active_leg && reach.margin < required {
                        return Err(Error::StrokeTooLong {
                            margin: reach.margin,
                            required,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Times at which the schedule is checked: every phase-aligned tick plus
    /// each phase boundary.
    fn check_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut start = 0.0;
        for p in &self.phases {
            let n = ticks_in(p.duration, self.ctx.settings.tick);
            for k in 0..n {
                out.push(start + p.duration * k as f64 / n as f64);
            }
            start += p.duration;
        }
        out.push(start);
        out
    }

    pub fn kind(&self) -> GaitKind {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn active_leg(&self) -> LegId {
        self.active_leg
    }

    pub fn phases(&self) -> &[GaitPhase] {
        &self.phases
    }

    pub fn context(&self) -> &GaitContext {
        &self.ctx
    }

    pub fn period(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// Start time of every phase.
    pub fn phase_starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.phases
            .iter()
            .map(|p| {
                let s = t;
                t += p.duration;
                s
            })
            .collect()
    }

    fn previous(&self, i: usize) -> &GaitPhase {
        let n = self.phases.len();
        &self.phases[(i + n - 1) % n]
    }

    /// Samples phase `i` at `local` seconds into it.
    pub fn sample_phase(&self, i: usize, local: f64) -> ScheduleSample {
        let phase = &self.phases[i];
        let prev = self.previous(i);
        let f = (local / phase.duration).clamp(0.0, 1.0);
        let legs = std::array::from_fn(|k| {
            let from = prev.legs[k];
            let to = phase.legs[k];
            let switching = from.contact != to.contact;
            let in_transition = switching && local < self.ctx.settings.transition_time;
            LegSample {
                target: from.target.lerp(to.target, f),
                contact: if in_transition {
                    from.contact
                } else {
                    to.contact
                },
                in_transition,
                grounded: to.grounded,
            }
        });
        ScheduleSample {
            phase: i,
            legs,
            body_roll: phase.body_roll,
            sphere_engaged: phase.sphere_engaged,
        }
    }

    /// Samples the schedule at `t` in `[0, period]`; times outside wrap.
    pub fn sample(&self, t: f64) -> ScheduleSample {
        let period = self.period();
        let mut t = if t > period || t < 0.0 {
            t.rem_euclid(period)
        } else {
            t
        };
        let last = self.phases.len() - 1;
        for (i, p) in self.phases.iter().enumerate() {
            if t < p.duration || i == last {
                return self.sample_phase(i, t.min(p.duration));
            }
            t -= p.duration;
        }
        unreachable!("schedule has at least one phase")
    }

    /// Joint angles of every leg at `t`.
    pub fn joint_angles(&self, t: f64) -> Result<[JointAngles; 3]> {
        self.joint_angles_of(&self.sample(t))
    }

    pub fn joint_angles_of(&self, s: &ScheduleSample) -> Result<[JointAngles; 3]> {
        let mut out = [JointAngles::default(); 3];
        for leg in LegId::ALL {
            let q0 = self.ctx.leg_q0(leg, self.active_leg, s.body_roll);
            out[leg.index()] = leg_ik(
                s.legs[leg.index()].target,
                q0,
                &self.ctx.geometry,
                &self.ctx.limits,
            )
            .map_err(|e| e.on_leg(leg))?;
        }
        Ok(out)
    }

    /// Uniform control-tick sample times `k·tick`, `k < ceil(period / tick)`.
    pub fn tick_times(&self) -> Vec<f64> {
        let tick = self.ctx.settings.tick;
        let n = ticks_in(self.period(), tick);
        (0..n).map(|k| k as f64 * tick).collect()
    }

    /// Signed radial distance covered by the active foot while grounded and
    /// frictional over one cycle (positive = pushing outward).
    pub fn net_stroke(&self) -> f64 {
        let a = self.active_leg.index();
        self.phases
            .iter()
            .enumerate()
            .filter(|(_, p)| p.legs[a].grounded && p.legs[a].contact == ContactMode::Frictional)
            .map(|(i, p)| p.legs[a].target.x - self.previous(i).legs[a].target.x)
            .sum()
    }
}

/// Number of control ticks covering `duration`.
pub(crate) fn ticks_in(duration: f64, tick: f64) -> usize {
    ((duration / tick) - 1e-9).ceil().max(1.0) as usize
}

fn stroke_ends(center: f64, length: f64, direction: Direction) -> (f64, f64) {
    let near = center - 0.5 * length;
    let far = center + 0.5 * length;
    match direction {
        Direction::Forward => (near, far),
        Direction::Backward => (far, near),
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive (got {v})"
        )));
    }
    Ok(())
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative (got {v})"
        )));
    }
    Ok(())
}

fn passive_legs(active: LegId, stance: FootTarget) -> [LegPhase; 3] {
    let _ = active;
    [LegPhase {
        target: stance,
        contact: ContactMode::Rolling,
        grounded: true,
    }; 3]
}

fn stroke_schedule(
    kind: GaitKind,
    p: &StrokeParams,
    direction: Direction,
    ctx: &GaitContext,
) -> Result<GaitSchedule> {
    check_non_negative("stroke_length", p.stroke_length)?;
    check_positive("period", p.period)?;
    check_non_negative("sphere_lift", p.sphere_lift)?;
    if !(p.push_fraction > 0.0 && p.push_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "push_fraction must be in (0, 1) (got {})",
            p.push_fraction
        )));
    }
    if p.switch_duration < ctx.settings.transition_time {
        return Err(Error::InvalidParameter(format!(
            "switch_duration {} is shorter than the contact transition time {}",
            p.switch_duration, ctx.settings.transition_time
        )));
    }
    let stroking = p.period - 2.0 * p.switch_duration;
    if stroking <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "period {} leaves no time for the stroke after two mode switches",
            p.period
        )));
    }
    let sphere_engaged = kind == GaitKind::Scoot;
    let lift = if sphere_engaged { 0.0 } else { p.sphere_lift };
    let ground = ctx.ground_y(lift);
    let (start, end) = stroke_ends(p.stroke_center, p.stroke_length, direction);
    let a = p.active_leg.index();
    let stance = ctx.stance_target(lift);

    let phase = |kind, duration, x: f64, contact, roll| {
        let mut legs = passive_legs(p.active_leg, stance);
        legs[a] = LegPhase {
            target: FootTarget::new(x, ground),
            contact,
            grounded: true,
        };
        GaitPhase {
            kind,
            duration,
            legs,
            body_roll: roll,
            sphere_engaged,
        }
    };
    let push = stroking * p.push_fraction;
    let recover = stroking - push;
    let phases = vec![
        phase(
            PhaseKind::Plant,
            p.switch_duration,
            start,
            ContactMode::Frictional,
            0.0,
        ),
        phase(
            PhaseKind::Push,
            push,
            end,
            ContactMode::Frictional,
            p.body_roll,
        ),
        phase(
            PhaseKind::Release,
            p.switch_duration,
            end,
            ContactMode::Rolling,
            0.0,
        ),
        phase(
            PhaseKind::Recover,
            recover,
            start,
            ContactMode::Rolling,
            p.body_roll,
        ),
    ];
    let g = GaitSchedule {
        kind,
        direction,
        active_leg: p.active_leg,
        phases,
        ctx: *ctx,
        spec: Some(match kind {
            GaitKind::Scoot => GaitSpec::Scoot(*p),
            _ => GaitSpec::Shuffle(*p),
        }),
    };
    g.validate(Some(ctx.settings.safety_margin))?;
    Ok(g)
}

/// Quasi-static scooting: four ground contacts throughout; the active foot
/// alternates a frictional push with a rolling recovery.
pub fn build_scoot(
    p: &StrokeParams,
    direction: Direction,
    ctx: &GaitContext,
) -> Result<GaitSchedule> {
    stroke_schedule(GaitKind::Scoot, p, direction, ctx)
}

/// Scooting with the sphere carried off the ground: three foot contacts.
pub fn build_shuffle(
    p: &StrokeParams,
    direction: Direction,
    ctx: &GaitContext,
) -> Result<GaitSchedule> {
    stroke_schedule(GaitKind::Shuffle, p, direction, ctx)
}

/// Skating: the active foot stays frictional, pushes, then lifts and
/// returns through the air while the body coasts on the sphere and the two
/// rolling legs.
pub fn build_skate(
    p: &SkateParams,
    direction: Direction,
    ctx: &GaitContext,
) -> Result<GaitSchedule> {
    check_non_negative("stroke_length", p.stroke_length)?;
    check_positive("lift_height", p.lift_height)?;
    check_positive("period", p.period)?;
    if !(p.coast_fraction > 0.0 && p.coast_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "coast_fraction must be in (0, 1) (got {})",
            p.coast_fraction
        )));
    }
    let ground = ctx.ground_y(0.0);
    let up = ground + p.lift_height;
    let (start, end) = stroke_ends(p.stroke_center, p.stroke_length, direction);
    let a = p.active_leg.index();
    let stance = ctx.stance_target(0.0);
    let push = p.period * (1.0 - p.coast_fraction);
    let coast = p.period - push;

    let phase = |kind, duration, target, grounded| {
        let mut legs = passive_legs(p.active_leg, stance);
        legs[a] = LegPhase {
            target,
            contact: ContactMode::Frictional,
            grounded,
        };
        GaitPhase {
            kind,
            duration,
            legs,
            body_roll: p.body_roll,
            sphere_engaged: true,
        }
    };
    let phases = vec![
        phase(PhaseKind::Push, push, FootTarget::new(end, ground), true),
        phase(
            PhaseKind::Lift,
            0.25 * coast,
            FootTarget::new(end, up),
            false,
        ),
        phase(
            PhaseKind::Return,
            0.5 * coast,
            FootTarget::new(start, up),
            false,
        ),
        phase(
            PhaseKind::Lower,
            0.25 * coast,
            FootTarget::new(start, ground),
            false,
        ),
    ];
    let g = GaitSchedule {
        kind: GaitKind::Skate,
        direction,
        active_leg: p.active_leg,
        phases,
        ctx: *ctx,
        spec: Some(GaitSpec::Skate(*p)),
    };
    g.validate(Some(ctx.settings.safety_margin))?;
    Ok(g)
}

/// Same gait with pulling instead of pushing. Built-in gaits are rebuilt
/// from their parameters, so reversing twice gives back the same schedule;
/// custom schedules mirror the active foot about the middle of its range.
pub fn reverse(g: &GaitSchedule) -> GaitSchedule {
    let dir = g.direction.flip();
    let rebuilt = match g.spec {
        Some(GaitSpec::Scoot(p)) => Some(build_scoot(&p, dir, &g.ctx)),
        Some(GaitSpec::Shuffle(p)) => Some(build_shuffle(&p, dir, &g.ctx)),
        Some(GaitSpec::Skate(p)) => Some(build_skate(&p, dir, &g.ctx)),
        None => None,
    };
    // Stroke ends are symmetric about the center, so a rebuilt built-in gait
    // is always as reachable as the original.
    if let Some(Ok(r)) = rebuilt {
        return r;
    }
    let a = g.active_leg.index();
    let (lo, hi) = g
        .phases
        .iter()
        .map(|p| p.legs[a].target.x)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    let mid = 0.5 * (lo + hi);
    let mut out = g.clone();
    out.direction = dir;
    for p in &mut out.phases {
        let t = &mut p.legs[a].target;
        t.x = 2.0 * mid - t.x;
    }
    out
}

fn hold_schedule(kind: GaitKind, contact: ContactMode, ctx: &GaitContext) -> Result<GaitSchedule> {
    let stance = ctx.stance_target(0.0);
    let g = GaitSchedule {
        kind,
        direction: Direction::Forward,
        active_leg: LegId::A,
        phases: vec![GaitPhase {
            kind: PhaseKind::Hold,
            duration: ctx.settings.hold_duration,
            legs: [LegPhase {
                target: stance,
                contact,
                grounded: true,
            }; 3],
            body_roll: 0.0,
            sphere_engaged: true,
        }],
        ctx: *ctx,
        spec: None,
    };
    g.validate(None)?;
    Ok(g)
}

/// All rolling contacts: the body glides under external forces.
pub fn maneuver_stand(ctx: &GaitContext) -> Result<GaitSchedule> {
    hold_schedule(GaitKind::Stand, ContactMode::Rolling, ctx)
}

/// All feet frictional: the body is anchored.
pub fn maneuver_brake(ctx: &GaitContext) -> Result<GaitSchedule> {
    hold_schedule(GaitKind::Brake, ContactMode::Frictional, ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PivotManeuver {
    pub anchor_leg: LegId,
    /// How long the anchor foot stays planted (s).
    pub contact_duration: f64,
    /// Horizontal distance from the sphere center to the planted foot (m).
    pub anchor_distance: f64,
}

impl Default for PivotManeuver {
    fn default() -> Self {
        PivotManeuver {
            anchor_leg: LegId::B,
            contact_duration: 0.5,
            anchor_distance: 0.153,
        }
    }
}

/// One frictional anchor foot, two rolling legs. The rotation itself is
/// produced by the simulator from the body's momentum.
pub fn maneuver_pivot(p: &PivotManeuver, ctx: &GaitContext) -> Result<GaitSchedule> {
    check_positive("contact_duration", p.contact_duration)?;
    check_positive("anchor_distance", p.anchor_distance)?;
    let stance = ctx.stance_target(0.0);
    let mut legs = [LegPhase {
        target: stance,
        contact: ContactMode::Rolling,
        grounded: true,
    }; 3];
    legs[p.anchor_leg.index()] = LegPhase {
        target: FootTarget::new(p.anchor_distance, stance.y),
        contact: ContactMode::Frictional,
        grounded: true,
    };
    let g = GaitSchedule {
        kind: GaitKind::Pivot,
        direction: Direction::Forward,
        active_leg: p.anchor_leg,
        phases: vec![GaitPhase {
            kind: PhaseKind::Hold,
            duration: p.contact_duration,
            legs,
            body_roll: 0.0,
            sphere_engaged: true,
        }],
        ctx: *ctx,
        spec: None,
    };
    g.validate(None)?;
    Ok(g)
}

/// Level-body stance on an incline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclineStance {
    pub incline: f64,
    pub uphill_azimuth: f64,
    pub targets: [FootTarget; 3],
    pub angles: [JointAngles; 3],
    /// Reach margin of each foot (m).
    pub margins: [f64; 3],
}

impl InclineStance {
    /// Signed distance of a leg-plane point of `leg` from the inclined plane
    /// (positive above).
    pub fn plane_residual(&self, leg: LegId, point: FootTarget, geom: &RobotGeometry) -> f64 {
        let c = (leg.azimuth(geom) - self.uphill_azimuth).cos();
        let (s, k) = self.incline.sin_cos();
        -s * c * point.x + k * point.y + geom.sphere_radius
    }
}

/// Ground height under a foot at radial distance `x` of a leg whose azimuth
/// makes angle `rel` with the uphill direction, for a plane tangent to the
/// sphere.
fn incline_ground_y(x: f64, rel: f64, incline: f64, radius: f64) -> f64 {
    (-radius + incline.sin() * rel.cos() * x) / incline.cos()
}

/// Keeps the body level (hub above the sphere center) while all three feet
/// touch a plane of slope `incline` rising toward `uphill_azimuth`.
pub fn orientation_aware_stand(
    incline: f64,
    uphill_azimuth: f64,
    ctx: &GaitContext,
) -> Result<InclineStance> {
    match incline_stance(incline, uphill_azimuth, ctx) {
        Ok(s) => Ok(s),
        Err(e) if e.is_infeasible() => Err(Error::InclineTooSteep {
            incline,
            max_incline: max_stand_incline(uphill_azimuth, ctx),
        }),
        Err(e) => Err(e),
    }
}

fn incline_stance(incline: f64, uphill_azimuth: f64, ctx: &GaitContext) -> Result<InclineStance> {
    if !incline.is_finite() || !(0.0..FRAC_PI_2).contains(&incline) {
        return Err(Error::InvalidParameter(format!(
            "incline must be in [0, π/2) (got {incline})"
        )));
    }
    let g = &ctx.geometry;
    let mut targets = [FootTarget::default(); 3];
    let mut angles = [JointAngles::default(); 3];
    let mut margins = [0.0; 3];
    for leg in LegId::ALL {
        let rel = leg.azimuth(g) - uphill_azimuth;
        let x = g.stance_radius;
        let target = FootTarget::new(x, incline_ground_y(x, rel, incline, g.sphere_radius));
        let i = leg.index();
        angles[i] = leg_ik(target, FRAC_PI_2, g, &ctx.limits).map_err(|e| e.on_leg(leg))?;
        margins[i] = workspace_contains(target, FRAC_PI_2, g, &ctx.limits).margin;
        targets[i] = target;
    }
    Ok(InclineStance {
        incline,
        uphill_azimuth,
        targets,
        angles,
        margins,
    })
}

/// Steepest incline for which the level stance is reachable, by bisection.
pub fn max_stand_incline(uphill_azimuth: f64, ctx: &GaitContext) -> f64 {
    let ok = |b: f64| incline_stance(b, uphill_azimuth, ctx).is_ok();
    if !ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, FRAC_PI_2 - 1e-6);
    if ok(hi) {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ctx() -> GaitContext {
        GaitContext::default()
    }

    fn builtins() -> Vec<GaitSchedule> {
        let c = ctx();
        let mut v = Vec::new();
        for dir in [Direction::Forward, Direction::Backward] {
            v.push(build_scoot(&StrokeParams::scoot_default(), dir, &c).unwrap());
            v.push(build_shuffle(&StrokeParams::shuffle_default(), dir, &c).unwrap());
            v.push(build_skate(&SkateParams::default(), dir, &c).unwrap());
        }
        v
    }

    #[test]
    fn scoot_keeps_four_contacts() {
        let g = build_scoot(&StrokeParams::scoot_default(), Direction::Forward, &ctx()).unwrap();
        assert_eq!(g.phases().len(), 4);
        for p in g.phases() {
            assert_eq!(p.ground_contacts(), 4);
            assert!(p.sphere_engaged);
        }
        assert!(g.phases()[1].body_roll > 0.0);
        assert!(g.phases()[3].body_roll > 0.0);
    }

    #[test]
    fn shuffle_keeps_three_feet_and_no_sphere() {
        let g =
            build_shuffle(&StrokeParams::shuffle_default(), Direction::Forward, &ctx()).unwrap();
        for p in g.phases() {
            assert!(!p.sphere_engaged);
            assert_eq!(p.ground_contacts(), 3);
        }
    }

    #[test]
    fn skate_active_foot_always_frictional() {
        let g = build_skate(&SkateParams::default(), Direction::Forward, &ctx()).unwrap();
        let a = g.active_leg().index();
        for p in g.phases() {
            assert_eq!(p.legs[a].contact, ContactMode::Frictional);
            let expect = if p.kind == PhaseKind::Push { 4 } else { 3 };
            assert_eq!(p.ground_contacts(), expect, "{:?}", p.kind);
        }
        let lift = g
            .phases()
            .iter()
            .find(|p| p.kind == PhaseKind::Lift)
            .unwrap();
        assert_eq!(lift.ground_contacts(), 3);
    }

    #[test]
    fn builtins_are_periodic() {
        for g in builtins() {
            let s0 = g.sample(0.0);
            let s1 = g.sample(g.period());
            for k in 0..3 {
                assert_abs_diff_eq!(s0.legs[k].target.x, s1.legs[k].target.x, epsilon = 1e-15);
                assert_abs_diff_eq!(s0.legs[k].target.y, s1.legs[k].target.y, epsilon = 1e-15);
                assert_eq!(s0.legs[k].contact, s1.legs[k].contact);
            }
        }
    }

    #[test]
    fn builtins_stay_in_workspace() {
        let c = ctx();
        for g in builtins() {
            for t in g.tick_times() {
                let s = g.sample(t);
                for leg in LegId::ALL {
                    let q0 = c.leg_q0(leg, g.active_leg(), s.body_roll);
                    let r =
                        workspace_contains(s.legs[leg.index()].target, q0, &c.geometry, &c.limits);
                    assert!(r.contained, "{:?} {leg:?} at {t}", g.kind());
                }
            }
        }
    }

    #[test]
    fn reverse_is_an_involution_and_keeps_period() {
        for g in builtins() {
            let r = reverse(&g);
            assert_ne!(r.direction(), g.direction());
            assert_abs_diff_eq!(r.period(), g.period(), epsilon = 1e-15);
            assert_eq!(reverse(&r), g);
            assert_abs_diff_eq!(r.net_stroke(), -g.net_stroke(), epsilon = 1e-12);
            let kinds: Vec<_> = g.phases().iter().map(|p| p.kind).collect();
            let rkinds: Vec<_> = r.phases().iter().map(|p| p.kind).collect();
            assert_eq!(kinds, rkinds);
        }
    }

    #[test]
    fn custom_reverse_mirrors_active_foot() {
        let c = ctx();
        let base = build_scoot(&StrokeParams::scoot_default(), Direction::Forward, &c).unwrap();
        let custom =
            GaitSchedule::from_phases(LegId::A, Direction::Forward, base.phases().to_vec(), c)
                .unwrap();
        let r = reverse(&custom);
        assert_abs_diff_eq!(r.net_stroke(), -custom.net_stroke(), epsilon = 1e-12);
        let rr = reverse(&r);
        assert_abs_diff_eq!(rr.net_stroke(), custom.net_stroke(), epsilon = 1e-12);
    }

    #[test]
    fn zero_stroke_is_allowed() {
        let p = StrokeParams {
            stroke_length: 0.0,
            ..StrokeParams::scoot_default()
        };
        let g = build_scoot(&p, Direction::Forward, &ctx()).unwrap();
        assert_eq!(g.net_stroke(), 0.0);
    }

    #[test]
    fn unreachable_stroke_is_rejected() {
        let p = StrokeParams {
            stroke_length: 0.5,
            ..StrokeParams::scoot_default()
        };
        let err = build_scoot(&p, Direction::Forward, &ctx()).unwrap_err();
        assert!(err.is_infeasible(), "{err}");
    }

    #[test]
    fn stroke_near_the_reach_boundary_is_too_long() {
        // Far end within the workspace but inside the safety margin.
        let c = ctx();
        let g = &c.geometry;
        let reach_x = g.d + ((g.l1 + g.l2).powi(2) - (g.l0 + g.sphere_radius).powi(2)).sqrt();
        let p = StrokeParams {
            stroke_center: 0.5 * (0.09 + reach_x - 0.002),
            stroke_length: reach_x - 0.002 - 0.09,
            body_roll: 0.0,
            ..StrokeParams::scoot_default()
        };
        match build_scoot(&p, Direction::Forward, &c) {
            Err(Error::StrokeTooLong { margin, required }) => {
                assert!(margin < required);
                assert!(margin > 0.0);
            }
            other => panic!("expected StrokeTooLong, got {other:?}"),
        }
    }

    #[test]
    fn excessive_roll_is_rejected() {
        let p = StrokeParams {
            body_roll: 0.2,
            ..StrokeParams::scoot_default()
        };
        assert!(matches!(
            build_scoot(&p, Direction::Forward, &ctx()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn stand_and_brake_are_single_static_phases() {
        let c = ctx();
        let stand = maneuver_stand(&c).unwrap();
        let brake = maneuver_brake(&c).unwrap();
        assert_eq!(stand.phases().len(), 1);
        assert!(stand.phases()[0]
            .legs
            .iter()
            .all(|l| l.contact == ContactMode::Rolling));
        assert!(brake.phases()[0]
            .legs
            .iter()
            .all(|l| l.contact == ContactMode::Frictional));
    }

    #[test]
    fn pivot_anchor_is_placed_at_distance() {
        let p = PivotManeuver::default();
        let g = maneuver_pivot(&p, &ctx()).unwrap();
        let leg = g.phases()[0].legs[p.anchor_leg.index()];
        assert_eq!(leg.contact, ContactMode::Frictional);
        assert_eq!(leg.target.x, 0.153);
        let others = g.phases()[0]
            .legs
            .iter()
            .filter(|l| l.contact == ContactMode::Rolling)
            .count();
        assert_eq!(others, 2);
    }

    #[test]
    fn transition_reports_previous_mode() {
        let g = build_scoot(&StrokeParams::scoot_default(), Direction::Forward, &ctx()).unwrap();
        let a = g.active_leg().index();
        let early = g.sample_phase(0, 0.05);
        assert!(early.legs[a].in_transition);
        assert_eq!(early.legs[a].contact, ContactMode::Rolling);
        let late = g.sample_phase(0, 0.18);
        assert!(!late.legs[a].in_transition);
        assert_eq!(late.legs[a].contact, ContactMode::Frictional);
    }

    #[test]
    fn level_incline_stance_is_symmetric() {
        let s = orientation_aware_stand(0.0, PI, &ctx()).unwrap();
        for k in 1..3 {
            assert_abs_diff_eq!(s.targets[k].x, s.targets[0].x, epsilon = 1e-15);
            assert_abs_diff_eq!(s.targets[k].y, s.targets[0].y, epsilon = 1e-15);
        }
        assert!(s.margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn downhill_leg_extends_on_incline() {
        let c = ctx();
        // Uphill points away from leg A, so A is the downhill leg.
        let s = orientation_aware_stand(5f64.to_radians(), PI, &c).unwrap();
        let shoulder = crate::kinematics::leg_points(s.angles[0], &c.geometry).shoulder;
        let ext = |k: usize| s.targets[k].distance(shoulder);
        assert!(ext(0) > ext(1));
        assert!(ext(0) > ext(2));
        for leg in LegId::ALL {
            let foot = crate::kinematics::leg_fk(s.angles[leg.index()], &c.geometry);
            assert!(s.plane_residual(leg, foot, &c.geometry).abs() < 1e-6);
        }
        assert!(s.margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn steep_incline_reports_maximum() {
        let c = ctx();
        let max = max_stand_incline(PI, &c);
        assert!(max > 5f64.to_radians());
        assert!(orientation_aware_stand(max * 0.99, PI, &c).is_ok());
        match orientation_aware_stand(max + 0.01, PI, &c) {
            Err(Error::InclineTooSteep { max_incline, .. }) => {
                assert_abs_diff_eq!(max_incline, max, epsilon = 1e-12)
            }
            other => panic!("expected InclineTooSteep, got {other:?}"),
        }
    }
}
