//! Scripted multi-step maneuvers: climbing a single stair and stepping over
//! a cord.
//!
//! The stair climb is kinematic bookkeeping in the sagittal plane: leg A
//! faces the stair (world +x), the stair edge is at `x = 0` and its tread
//! starts there at height `rise`. Each step ends in a pose; the next step
//! starts from it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{
    build_shuffle, build_skate, ContactMode, Direction, GaitContext, GaitKind, GaitSchedule, LegId,
    PhaseKind, SkateParams, StrokeParams,
};
use crate::kinematics::{
    lean_q0, leg_fk, leg_ik, leg_points, wrap_angle, FootTarget, JointAngles, RobotGeometry,
};
use crate::sim::{
    change_heading, leading_heading, simulate, BodyState, CoastModel, SimOptions, Trajectory,
};
use crate::stability::{
    classify_support, stability_margin, unit, ContactLabel, ContactPoint, ContactSet, MassModel,
    SupportMode, Vec2,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StairSpec {
    pub rise: f64,
    pub tread_depth: f64,
}

/// Tunables of the stair climb. None of these are dictated by the robot;
/// they are waypoints chosen to keep every pose reachable and stable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StairSettings {
    /// How far the sphere is lifted above the stair height in step B (m).
    pub clearance: f64,
    /// Distance from the edge to the front foot before the climb (m).
    pub approach_gap: f64,
    /// How far past the edge the front foot is planted in step A (m).
    pub foot_inset: f64,
    /// Radial reach of the planted front foot after the pull of step A (m).
    pub plant_radius: f64,
    /// Radial reach of the front foot after it rolls out in step C (m).
    pub front_reach: f64,
    /// Distance past the edge where the sphere lands in step D (m).
    pub sphere_setback: f64,
    /// Front foot height below the sphere center while raised (m).
    pub raised_drop: f64,
    /// Cage rim point in the body frame: forward offset and drop below the
    /// sphere center (m).
    pub cage_rim_forward: f64,
    pub cage_rim_drop: f64,
    /// Half the width of the rim segment that touches the tread (m).
    pub cage_half_width: f64,
    /// Leg-plane target of the folded back legs (m).
    pub fold_x: f64,
    pub fold_y: f64,
    pub step_duration: f64,
}

impl Default for StairSettings {
    fn default() -> Self {
        StairSettings {
            clearance: 0.010,
            approach_gap: 0.08,
            foot_inset: 0.03,
            plant_radius: 0.14,
            front_reach: 0.22,
            sphere_setback: 0.02,
            raised_drop: 0.03,
            cage_rim_forward: 0.09,
            cage_rim_drop: 0.08,
            cage_half_width: 0.04,
            fold_x: 0.08,
            fold_y: -0.05,
            step_duration: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub reasons: Vec<String>,
}

/// Diameter of the smallest circle containing the standing-pose feet.
pub fn operating_diameter(geom: &RobotGeometry) -> f64 {
    let pts: Vec<Vec2> = geom
        .leg_azimuths
        .iter()
        .map(|&a| unit(a) * geom.stance_radius)
        .collect();
    2.0 * enclosing_radius(&pts)
}

/// Smallest enclosing circle radius of three points.
fn enclosing_radius(p: &[Vec2]) -> f64 {
    let (a, b, c) = (p[0], p[1], p[2]);
    let sides = [(b - c).norm(), (a - c).norm(), (a - b).norm()];
    let longest = sides.iter().cloned().fold(0.0, f64::max);
    let sq: f64 = sides.iter().map(|s| s * s).sum();
    // Obtuse or right triangle: the longest side is a diameter.
    if 2.0 * longest * longest >= sq {
        return longest / 2.0;
    }
    let area2 = ((b - a).x * (c - a).y - (b - a).y * (c - a).x).abs();
    sides[0] * sides[1] * sides[2] / (2.0 * area2)
}

pub fn stair_feasible(stair: &StairSpec, geom: &RobotGeometry) -> Feasibility {
    let mut reasons = Vec::new();
    if !(stair.rise.is_finite() && stair.rise > 0.0) {
        reasons.push(format!("rise must be positive (got {})", stair.rise));
    }
    if !(stair.tread_depth.is_finite() && stair.tread_depth > 0.0) {
        reasons.push(format!(
            "tread depth must be positive (got {})",
            stair.tread_depth
        ));
    }
    let diameter = operating_diameter(geom);
    if stair.tread_depth < diameter {
        reasons.push(format!(
            "tread depth {:.4} m is shallower than the operating circle diameter {diameter:.4} m",
            stair.tread_depth
        ));
    }
    if stair.rise > 0.5 * geom.hip_height {
        reasons.push(format!(
            "rise {:.4} m exceeds 50% of the hip height {:.4} m",
            stair.rise, geom.hip_height
        ));
    }
    Feasibility {
        feasible: reasons.is_empty(),
        reasons,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StairPanel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl StairPanel {
    pub const ALL: [StairPanel; 7] = [
        StairPanel::A,
        StairPanel::B,
        StairPanel::C,
        StairPanel::D,
        StairPanel::E,
        StairPanel::F,
        StairPanel::G,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CordPart {
    /// Backward skate: the leading leg steps over.
    LeadingLeg,
    /// Backward shuffle: the raised sphere passes over.
    Sphere,
    /// Heading change and forward skate on the second leg.
    SecondLeg,
    ThirdLeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepLabel {
    Stair(StairPanel),
    Cord(CordPart),
}

impl std::fmt::Display for StepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepLabel::Stair(p) => write!(f, "{p:?}"),
            StepLabel::Cord(CordPart::LeadingLeg) => f.write_str("cord-1-leading-leg"),
            StepLabel::Cord(CordPart::Sphere) => f.write_str("cord-2-sphere"),
            StepLabel::Cord(CordPart::SecondLeg) => f.write_str("cord-3-second-leg"),
            StepLabel::Cord(CordPart::ThirdLeg) => f.write_str("cord-4-third-leg"),
        }
    }
}

/// One foot of a stair pose, in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairFoot {
    /// Leg-plane target relative to the sphere center.
    pub target: FootTarget,
    pub contact: ContactMode,
    pub grounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairPose {
    /// Sphere center: x along the climb, z up (m).
    pub center_x: f64,
    pub center_z: f64,
    /// Forward pitch of the body toward leg A (rad).
    pub pitch: f64,
    pub feet: [StairFoot; 3],
    pub sphere_grounded: bool,
    pub cage_grounded: bool,
}

impl StairPose {
    pub fn q0(&self, leg: LegId, geom: &RobotGeometry) -> f64 {
        lean_q0(leg.azimuth(geom), LegId::A.azimuth(geom), self.pitch)
    }

    pub fn joint_angles(&self, ctx: &GaitContext) -> Result<[JointAngles; 3]> {
        let mut out = [JointAngles::default(); 3];
        for leg in LegId::ALL {
            out[leg.index()] = leg_ik(
                self.feet[leg.index()].target,
                self.q0(leg, &ctx.geometry),
                &ctx.geometry,
                &ctx.limits,
            )
            .map_err(|e| e.on_leg(leg))?;
        }
        Ok(out)
    }

    /// World x of a foot (horizontal projection onto the climb direction).
    pub fn foot_x(&self, leg: LegId, geom: &RobotGeometry) -> f64 {
        self.center_x + self.feet[leg.index()].target.x * leg.azimuth(geom).cos()
    }

    pub fn foot_z(&self, leg: LegId) -> f64 {
        self.center_z + self.feet[leg.index()].target.y
    }

    /// Cage rim point (x, z) in world coordinates.
    pub fn rim(&self, s: &StairSettings) -> (f64, f64) {
        let (sn, cs) = self.pitch.sin_cos();
        (
            self.center_x + s.cage_rim_forward * cs - s.cage_rim_drop * sn,
            self.center_z - s.cage_rim_forward * sn - s.cage_rim_drop * cs,
        )
    }

    /// Ground contacts projected onto the horizontal plane, centered on the
    /// climb axis.
    pub fn contacts(&self, geom: &RobotGeometry, s: &StairSettings) -> Result<ContactSet> {
        let origin = Vec2::new(self.center_x, 0.0);
        let mut pts = Vec::new();
        for leg in LegId::ALL {
            let f = self.feet[leg.index()];
            if f.grounded {
                pts.push(ContactPoint {
                    label: ContactLabel::Foot(leg, f.contact),
                    position: origin + unit(leg.azimuth(geom)) * f.target.x,
                });
            }
        }
        if self.sphere_grounded {
            pts.push(ContactPoint {
                label: ContactLabel::Sphere,
                position: origin,
            });
        }
        if self.cage_grounded {
            let (x, _) = self.rim(s);
            for y in [-s.cage_half_width, s.cage_half_width] {
                pts.push(ContactPoint {
                    label: ContactLabel::CageEdge,
                    position: Vec2::new(x, y),
                });
            }
        }
        ContactSet::new(pts)
    }

    /// Ground projection of the center of mass. The hub swings forward with
    /// pitch; legs contribute their lumped mass points.
    pub fn com(&self, ctx: &GaitContext, mass: &MassModel) -> Result<Vec2> {
        let geom = &ctx.geometry;
        let angles = self.joint_angles(ctx)?;
        let hub = Vec2::new(mass.hub_height * self.pitch.sin(), 0.0);
        Ok(Vec2::new(self.center_x, 0.0) + mass.com(&angles, hub, geom))
    }

    pub fn support(&self, geom: &RobotGeometry, s: &StairSettings) -> Result<SupportMode> {
        Ok(classify_support(&self.contacts(geom, s)?).mode)
    }

    pub fn margin(&self, ctx: &GaitContext, mass: &MassModel, s: &StairSettings) -> Result<f64> {
        Ok(stability_margin(self.com(ctx, mass)?, &self.contacts(&ctx.geometry, s)?).margin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepAction {
    /// Move to a pose.
    Pose(StairPose),
    /// Run a gait for some strides.
    Gait {
        schedule: Box<GaitSchedule>,
        strides: usize,
    },
    /// Select another leading leg.
    ChangeHeading { from: LegId, to: LegId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStep {
    pub label: StepLabel,
    pub action: StepAction,
    pub expected_support: Option<SupportMode>,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StairSequence {
    pub stair: StairSpec,
    pub settings: StairSettings,
    pub start: StairPose,
    pub steps: Vec<SequenceStep>,
}

fn foot(x: f64, y: f64, contact: ContactMode, grounded: bool) -> StairFoot {
    StairFoot {
        target: FootTarget::new(x, y),
        contact,
        grounded,
    }
}

/// Rotates a leg-plane point about the sphere center by the in-plane share
/// of a forward pitch.
fn pitched(leg: LegId, p: FootTarget, pitch: f64, geom: &RobotGeometry) -> FootTarget {
    let th = -pitch * leg.azimuth(geom).cos();
    let (s, c) = th.sin_cos();
    FootTarget::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

/// Pitch at which the cage rim touches a surface one sphere radius below
/// the center.
fn rim_contact_pitch(s: &StairSettings, radius: f64) -> Option<f64> {
    let rho = s.cage_rim_forward.hypot(s.cage_rim_drop);
    if rho < radius {
        return None;
    }
    Some((radius / rho).asin() - s.cage_rim_drop.atan2(s.cage_rim_forward))
}

/// The seven-step climb. Every pose is checked for reachability, for the
/// feet staying on the correct side of the edge, and for stability in its
/// own support mode.
pub fn build_stair_sequence(
    stair: &StairSpec,
    ctx: &GaitContext,
    settings: &StairSettings,
    mass: &MassModel,
) -> Result<StairSequence> {
    let geom = &ctx.geometry;
    let feas = stair_feasible(stair, geom);
    if !feas.feasible {
        return Err(Error::Infeasible {
            reasons: feas.reasons,
        });
    }
    let s = settings;
    let r = geom.sphere_radius;
    let st = geom.stance_radius;
    let rise = stair.rise;
    let (a, b, c) = (LegId::A.index(), LegId::B.index(), LegId::C.index());
    let roll = |x, y| foot(x, y, ContactMode::Rolling, true);
    let grip = |x, y| foot(x, y, ContactMode::Frictional, true);

    let start = StairPose {
        center_x: -(st + s.approach_gap),
        center_z: r,
        pitch: 0.0,
        feet: [roll(st, -r); 3],
        sphere_grounded: true,
        cage_grounded: false,
    };

    // A: plant the front foot on the tread and pull the body toward it.
    let front_x = s.foot_inset;
    let mut pa = start;
    pa.center_x = front_x - s.plant_radius;
    pa.feet[a] = grip(s.plant_radius, rise - r);

    // B: grip with the back legs and push the sphere up past the stair.
    let mut pb = pa;
    pb.center_z = r + rise + s.clearance;
    pb.sphere_grounded = false;
    pb.feet[a] = grip(s.plant_radius, rise - pb.center_z);
    for i in [b, c] {
        pb.feet[i] = grip(st, -pb.center_z);
    }

    // C: front foot rolls out along the tread.
    let mut pc = pb;
    pc.feet[a] = roll(s.front_reach, rise - pb.center_z);
    let front_world = pc.center_x + s.front_reach;

    // D: grip with the front foot, release the back legs and pull the
    // sphere onto the tread.
    let mut pd = pc;
    pd.center_x = s.sphere_setback;
    pd.center_z = r + rise;
    pd.sphere_grounded = true;
    pd.feet[a] = grip(front_world - pd.center_x, -r);
    for i in [b, c] {
        pd.feet[i] = roll(st, -pd.center_z);
    }

    // E: raise the front foot; the body pitches forward onto the cage rim
    // and carries the back legs off the floor.
    let pitch = rim_contact_pitch(s, r).ok_or_else(|| Error::Infeasible {
        reasons: vec!["cage rim cannot reach the tread".into()],
    })?;
    let mut pe = pd;
    pe.pitch = pitch;
    pe.cage_grounded = true;
    pe.feet[a] = foot(s.front_reach, -s.raised_drop, ContactMode::Rolling, false);
    for leg in [LegId::B, LegId::C] {
        let t = pitched(leg, pd.feet[leg.index()].target, pitch, geom);
        pe.feet[leg.index()] = foot(t.x, t.y, ContactMode::Rolling, false);
    }

    // F: fold the back legs above the tread.
    let mut pf = pe;
    for i in [b, c] {
        pf.feet[i] = foot(s.fold_x, s.fold_y, ContactMode::Rolling, false);
    }

    // G: set the front foot down, grip and pull the body level onto the
    // tread.
    let final_x = 0.5 * (0.5 * st + (stair.tread_depth - st));
    let mut pg = pf;
    pg.center_x = final_x;
    pg.pitch = 0.0;
    pg.cage_grounded = false;
    pg.feet = [roll(st, -r); 3];
    pg.feet[a] = grip(st, -r);

    let poses = [pa, pb, pc, pd, pe, pf, pg];
    let expected = [
        SupportMode::AllFeet,
        SupportMode::Braked,
        SupportMode::AllFeet,
        SupportMode::AllFeet,
        SupportMode::SpherePlusCage,
        SupportMode::SpherePlusCage,
        SupportMode::AllFeet,
    ];

    let mut reasons = Vec::new();
    for (pose, panel) in poses.iter().zip(StairPanel::ALL) {
        if let Err(e) = pose.joint_angles(ctx) {
            reasons.push(format!("step {panel:?}: {e}"));
            continue;
        }
        // Nothing but the front foot touches the tread before the sphere
        // is lifted, and nothing on the floor crosses the edge.
        for leg in LegId::ALL {
            let x = pose.foot_x(leg, geom);
            let z = pose.foot_z(leg);
            let f = pose.feet[leg.index()];
            let floor = if x < 0.0 { 0.0 } else { rise };
            if f.grounded && (z - floor).abs() > 1e-9 {
                reasons.push(format!(
                    "step {panel:?}: grounded leg {leg:?} is not on a surface"
                ));
            }
            if !f.grounded && z <= floor {
                reasons.push(format!(
                    "step {panel:?}: airborne leg {leg:?} hits the ground"
                ));
            }
        }
        if panel == StairPanel::F {
            for leg in [LegId::B, LegId::C] {
                if pose.foot_z(leg) <= rise {
                    reasons.push(format!("step F: leg {leg:?} is not above the tread"));
                }
            }
        }
        match pose.margin(ctx, mass, s) {
            Ok(m) if m > 0.0 => {}
            Ok(m) => reasons.push(format!("step {panel:?}: stability margin {m:.4} m")),
            Err(e) => reasons.push(format!("step {panel:?}: {e}")),
        }
    }
    if pd.center_x <= 0.0 {
        reasons.push("step D: sphere does not reach the tread".into());
    }
    if !reasons.is_empty() {
        return Err(Error::Infeasible { reasons });
    }

    let steps = poses
        .iter()
        .zip(StairPanel::ALL)
        .zip(expected)
        .map(|((pose, panel), mode)| SequenceStep {
            label: StepLabel::Stair(panel),
            action: StepAction::Pose(*pose),
            expected_support: Some(mode),
            duration: s.step_duration,
        })
        .collect();
    Ok(StairSequence {
        stair: *stair,
        settings: *s,
        start,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StairStepResult {
    pub label: StepLabel,
    pub start: StairPose,
    pub end: StairPose,
    pub support: SupportMode,
    pub margin: f64,
    pub com_height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StairRun {
    pub steps: Vec<StairStepResult>,
    /// Rise of the center of mass from the first to the last pose (m).
    pub com_rise: f64,
}

/// Height of the center of mass above the floor.
fn com_height(p: &StairPose, ctx: &GaitContext, mass: &MassModel) -> Result<f64> {
    let geom = &ctx.geometry;
    let angles = p.joint_angles(ctx)?;
    let mut m = mass.hub * (p.center_z + mass.hub_height * p.pitch.cos());
    m += mass.sphere * p.center_z;
    for leg in LegId::ALL {
        let pts = leg_points(angles[leg.index()], geom);
        let y = (pts.shoulder.y + 2.0 * pts.knee.y + pts.foot.y) / 4.0;
        m += mass.leg * (p.center_z + y);
    }
    Ok(m / mass.total())
}

/// Walks the step chain, recording support, margin and CoM height.
pub fn execute_stair_sequence(
    seq: &StairSequence,
    ctx: &GaitContext,
    mass: &MassModel,
) -> Result<StairRun> {
    let mut current = seq.start;
    let h0 = com_height(&current, ctx, mass)?;
    let mut steps = Vec::with_capacity(seq.steps.len());
    for step in &seq.steps {
        let StepAction::Pose(end) = step.action else {
            return Err(Error::InvalidParameter("stair steps must be poses".into()));
        };
        steps.push(StairStepResult {
            label: step.label,
            start: current,
            end,
            support: end.support(&ctx.geometry, &seq.settings)?,
            margin: end.margin(ctx, mass, &seq.settings)?,
            com_height: com_height(&end, ctx, mass)?,
        });
        current = end;
    }
    let h1 = com_height(&current, ctx, mass)?;
    Ok(StairRun {
        steps,
        com_rise: h1 - h0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CordSequence {
    pub cord_height: f64,
    pub geometry: RobotGeometry,
    pub steps: Vec<SequenceStep>,
}

impl CordSequence {
    pub fn heading_changes(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.action, StepAction::ChangeHeading { .. }))
            .count()
    }
}

/// Cord crossing: backward skate over the cord with the leading leg, a
/// backward shuffle carrying the sphere over, then two heading changes,
/// each followed by a forward skate that lifts the next trailing leg over.
pub fn build_cord_sequence(
    cord_height: f64,
    ctx: &GaitContext,
    skate: &SkateParams,
    shuffle: &StrokeParams,
    strides: usize,
) -> Result<CordSequence> {
    if !(cord_height.is_finite() && cord_height >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cord height must be non-negative (got {cord_height})"
        )));
    }
    if cord_height >= skate.lift_height {
        return Err(Error::CordTooHigh {
            cord_height,
            lift_height: skate.lift_height,
        });
    }
    let first = LegId::A;
    let second = LegId::B;
    let third = LegId::C;
    let skate_on = |leg, dir| {
        build_skate(
            &SkateParams {
                active_leg: leg,
                ..*skate
            },
            dir,
            ctx,
        )
    };
    let shuffle_sched = build_shuffle(
        &StrokeParams {
            active_leg: first,
            sphere_lift: skate.lift_height,
            ..*shuffle
        },
        Direction::Backward,
        ctx,
    )?;
    let gait = |label, g: GaitSchedule| SequenceStep {
        label: StepLabel::Cord(label),
        duration: g.period() * strides as f64,
        action: StepAction::Gait {
            schedule: Box::new(g),
            strides,
        },
        expected_support: None,
    };
    let turn = |label, from, to| SequenceStep {
        label: StepLabel::Cord(label),
        action: StepAction::ChangeHeading { from, to },
        expected_support: None,
        duration: 0.0,
    };
    let steps = vec![
        gait(CordPart::LeadingLeg, skate_on(first, Direction::Backward)?),
        gait(CordPart::Sphere, shuffle_sched),
        turn(CordPart::SecondLeg, first, second),
        gait(CordPart::SecondLeg, skate_on(second, Direction::Forward)?),
        turn(CordPart::ThirdLeg, second, third),
        gait(CordPart::ThirdLeg, skate_on(third, Direction::Forward)?),
    ];
    Ok(CordSequence {
        cord_height,
        geometry: ctx.geometry,
        steps,
    })
}

/// Lowest height above the ground of whatever crosses the cord during a
/// gait step: the airborne foot during its return swing, or the carried
/// sphere during a shuffle.
pub fn crossing_clearance(g: &GaitSchedule) -> Result<f64> {
    let ctx = g.context();
    let geom = &ctx.geometry;
    let r = geom.sphere_radius;
    if g.kind() == GaitKind::Shuffle {
        let ground = g.phases()[0].legs[g.active_leg().index()].target.y;
        return Ok(-ground - r);
    }
    let a = g.active_leg();
    let starts = g.phase_starts();
    let tick = ctx.settings.tick;
    let mut min = f64::INFINITY;
    for (i, p) in g.phases().iter().enumerate() {
        if p.kind != PhaseKind::Return {
            continue;
        }
        let n = crate::gait::ticks_in(p.duration, tick);
        for k in 0..=n {
            let s = g.sample(starts[i] + p.duration * k as f64 / n as f64);
            let q0 = ctx.leg_q0(a, a, s.body_roll);
            let angles = leg_ik(s.legs[a.index()].target, q0, geom, &ctx.limits)?;
            let foot = leg_fk(angles, geom);
            min = min.min(foot.y + r);
        }
    }
    if min.is_infinite() {
        return Err(Error::InvalidParameter(
            "gait has no airborne return swing".into(),
        ));
    }
    Ok(min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CordRun {
    pub trajectory: Trajectory,
    /// Clearance of each gait step, by label.
    pub clearances: Vec<(StepLabel, f64)>,
    pub heading_changes: usize,
}

pub fn execute_cord_sequence(
    seq: &CordSequence,
    coast: &CoastModel,
    mass: &MassModel,
) -> Result<CordRun> {
    let mut state = BodyState::default();
    let mut traj = Trajectory::default();
    let mut clearances = Vec::new();
    let mut heading_changes = 0;
    for step in &seq.steps {
        match &step.action {
            StepAction::Gait { schedule, strides } => {
                let clearance = crossing_clearance(schedule)?;
                if clearance <= seq.cord_height {
                    return Err(Error::Infeasible {
                        reasons: vec![format!(
                            "step {}: clearance {clearance:.4} m does not clear the cord",
                            step.label
                        )],
                    });
                }
                clearances.push((step.label, clearance));
                let geom = &schedule.context().geometry;
                let lead = leading_heading(state.orientation, schedule.active_leg(), geom);
                let heading = match schedule.direction() {
                    Direction::Forward => lead,
                    Direction::Backward => lead + PI,
                };
                // Carry momentum only if it points along the new gait.
                if state.heading_defined() && wrap_angle(state.heading - heading).abs() > 1e-9 {
                    state.speed = 0.0;
                }
                state.heading = wrap_angle(heading);
                let part = simulate(
                    schedule,
                    coast,
                    &SimOptions {
                        strides: *strides,
                        initial: state,
                        mass: *mass,
                        allow_unstable: false,
                    },
                )?;
                traj.append(&part);
                state = part.last_state().expect("non-empty trajectory");
            }
            StepAction::ChangeHeading { from, to } => {
                state = change_heading(&state, *from, *to, &seq.geometry);
                heading_changes += 1;
            }
            StepAction::Pose(_) => {
                return Err(Error::InvalidParameter("cord steps cannot be poses".into()))
            }
        }
    }
    Ok(CordRun {
        trajectory: traj,
        clearances,
        heading_changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ctx() -> GaitContext {
        GaitContext::default()
    }

    fn stair() -> StairSpec {
        StairSpec {
            rise: 0.1,
            tread_depth: 0.30,
        }
    }

    #[test]
    fn operating_diameter_of_equilateral_stance() {
        let g = RobotGeometry::default();
        assert_abs_diff_eq!(
            operating_diameter(&g),
            2.0 * g.stance_radius,
            epsilon = 1e-12
        );
    }

    #[test]
    fn feasibility_boundaries() {
        let g = RobotGeometry::default();
        assert!(stair_feasible(&stair(), &g).feasible);
        let high = StairSpec {
            rise: g.hip_height,
            ..stair()
        };
        let f = stair_feasible(&high, &g);
        assert!(!f.feasible);
        assert!(f.reasons[0].contains("50% of the hip height"));
        let d = operating_diameter(&g);
        let shallow = StairSpec {
            tread_depth: d - 1e-6,
            ..stair()
        };
        assert!(!stair_feasible(&shallow, &g).feasible);
        let exact = StairSpec {
            tread_depth: d,
            ..stair()
        };
        assert!(stair_feasible(&exact, &g).feasible);
    }

    #[test]
    fn stair_sequence_climbs_by_the_rise() {
        let c = ctx();
        let m = MassModel::default();
        let seq = build_stair_sequence(&stair(), &c, &StairSettings::default(), &m).unwrap();
        assert_eq!(seq.steps.len(), 7);
        let run = execute_stair_sequence(&seq, &c, &m).unwrap();
        for (step, res) in seq.steps.iter().zip(&run.steps) {
            assert_eq!(Some(res.support), step.expected_support, "{}", step.label);
            assert!(res.margin > 0.0, "{} {}", step.label, res.margin);
        }
        assert_eq!(run.steps[5].support, SupportMode::SpherePlusCage);
        assert_abs_diff_eq!(run.com_rise, 0.1, epsilon = 1e-12);
        for w in run.steps.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }

    #[test]
    fn infeasible_stair_is_rejected_with_reasons() {
        let c = ctx();
        let s = StairSpec {
            rise: 0.15,
            tread_depth: 0.1,
        };
        match build_stair_sequence(&s, &c, &StairSettings::default(), &MassModel::default()) {
            Err(Error::Infeasible { reasons }) => assert_eq!(reasons.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cord_sequence_has_two_heading_changes_and_clears() {
        let c = ctx();
        let sk = SkateParams::default();
        for h in [0.0, 0.01, 0.029] {
            let seq = build_cord_sequence(h, &c, &sk, &StrokeParams::shuffle_default(), 2).unwrap();
            assert_eq!(seq.heading_changes(), 2);
            let run =
                execute_cord_sequence(&seq, &CoastModel::default(), &MassModel::default()).unwrap();
            assert_eq!(run.heading_changes, 2);
            assert_eq!(run.clearances.len(), 4);
            assert!(run.clearances.iter().all(|&(_, cl)| cl > h));
        }
        assert!(matches!(
            build_cord_sequence(0.03, &c, &sk, &StrokeParams::shuffle_default(), 2),
            Err(Error::CordTooHigh { .. })
        ));
    }
}
