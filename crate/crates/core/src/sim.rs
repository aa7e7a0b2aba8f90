//! Planar locomotion simulator.
//!
//! The core is quasi-static: a frictional foot that is planted and moving in
//! the body frame drives the body by its stroke, scaled by `push_gain`.
//! On top of that sits a first-order coast model: at the end of every push
//! the body keeps the average push velocity, which then decays as
//! `exp(-decay_rate * t)` while it rolls. A planted foot that is not moving
//! bleeds off up to `anchor_hold_speed` of coast speed per tick and holds
//! the body in place.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{
    maneuver_pivot, ticks_in, ContactMode, GaitContext, GaitSchedule, LegId, PivotManeuver,
    ScheduleSample,
};
use crate::kinematics::{wrap_angle, RobotGeometry, TiltInput};
use crate::stability::{
    check_schedule_stability, sample_contacts, sample_stability, unit, ContactLabel, ContactPoint,
    ContactSet, MassModel, SupportMode, Vec2,
};

/// Speeds at or below this are treated as rest; heading is undefined.
pub const REST_SPEED: f64 = 1e-9;

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoastModel {
    /// Exponential decay rate of rolling speed (1/s). May be infinite.
    pub decay_rate: f64,
    /// Share of the stroke transferred to the body.
    pub push_gain: f64,
    /// Extra factor on strokes that pull the foot toward the body.
    pub pull_efficiency: f64,
    /// Coast speed a planted, stationary foot absorbs per tick (m/s).
    pub anchor_hold_speed: f64,
    /// Minimum speed needed to pivot about a planted foot (m/s).
    pub pivot_min_speed: f64,
    /// Foot-ground friction coefficient, used when braking on an incline.
    pub friction: f64,
}

impl Default for CoastModel {
    /// Decay rate and push gain come from [`calibrate`] run against the
    /// default gaits with targets scoot 0.16 m/s and skate 0.56 m/s.
    fn default() -> Self {
        CoastModel {
            decay_rate: CALIBRATED_DECAY_RATE,
            push_gain: CALIBRATED_PUSH_GAIN,
            pull_efficiency: 0.7,
            anchor_hold_speed: 0.3,
            pivot_min_speed: 0.05,
            friction: 0.8,
        }
    }
}

/// Frozen output of [`calibrate`] on the default scoot and skate with
/// [`CalibrationTargets::default`]; `calibration_is_frozen` re-derives them.
pub const CALIBRATED_DECAY_RATE: f64 = 3.198_944_251_150_805_5;
pub const CALIBRATED_PUSH_GAIN: f64 = 0.933_623_021_432_017_8;

impl CoastModel {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.decay_rate.is_nan() || self.decay_rate < 0.0 {
            v.push(format!(
                "coast.decay_rate must be >= 0 (got {})",
                self.decay_rate
            ));
        }
        if !(self.push_gain > 0.0 && self.push_gain <= 1.0) {
            v.push(format!(
                "coast.push_gain must be in (0, 1] (got {})",
                self.push_gain
            ));
        }
        if !(self.pull_efficiency > 0.0 && self.pull_efficiency <= 1.0) {
            v.push(format!(
                "coast.pull_efficiency must be in (0, 1] (got {})",
                self.pull_efficiency
            ));
        }
        for (name, x) in [
            ("coast.anchor_hold_speed", self.anchor_hold_speed),
            ("coast.pivot_min_speed", self.pivot_min_speed),
            ("coast.friction", self.friction),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                v.push(format!("{name} must be finite and >= 0 (got {x})"));
            }
        }
        v
    }

    /// Speed factor and distance factor of free coasting over `dt`.
    fn coast_step(&self, dt: f64) -> (f64, f64) {
        let k = self.decay_rate;
        if k == 0.0 {
            (1.0, dt)
        } else if k.is_infinite() {
            (0.0, 0.0)
        } else {
            ((-k * dt).exp(), -(-k * dt).exp_m1() / k)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub position: Vec2,
    /// Direction of motion; meaningful only while `speed > REST_SPEED`.
    pub heading: f64,
    /// Yaw of the body frame.
    pub orientation: f64,
    pub speed: f64,
    pub tilt: TiltInput,
}

impl Default for BodyState {
    fn default() -> Self {
        BodyState {
            position: Vec2::zeros(),
            heading: 0.0,
            orientation: 0.0,
            speed: 0.0,
            tilt: TiltInput::default(),
        }
    }
}

impl BodyState {
    pub fn heading_defined(&self) -> bool {
        self.speed > REST_SPEED
    }

    pub fn velocity(&self) -> Vec2 {
        if self.heading_defined() {
            unit(self.heading) * self.speed
        } else {
            Vec2::zeros()
        }
    }
}

/// World direction of travel when `leg` leads a forward gait.
pub fn leading_heading(orientation: f64, leg: LegId, geom: &RobotGeometry) -> f64 {
    wrap_angle(orientation + leg.azimuth(geom) + PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub body: BodyState,
    /// World-frame ground contacts.
    pub contacts: ContactSet,
    pub support: SupportMode,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Duration of one stride, for periodic gaits.
    pub stride_period: Option<f64>,
    pub strides: usize,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn last_state(&self) -> Option<BodyState> {
        self.samples.last().map(|s| s.body)
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.samples.iter().map(|s| s.body.position).collect()
    }

    /// Appends `other`, whose first sample must repeat this trajectory's
    /// last state; times are shifted to keep them increasing.
    pub fn append(&mut self, other: &Trajectory) {
        let offset = self.samples.last().map_or(0.0, |s| s.t);
        let skip = usize::from(!self.samples.is_empty());
        let t0 = other.samples.first().map_or(0.0, |s| s.t);
        self.samples
            .extend(other.samples.iter().skip(skip).map(|s| TrajectorySample {
                t: s.t - t0 + offset,
                ..s.clone()
            }));
        self.strides += other.strides;
        if self.stride_period != other.stride_period {
            self.stride_period = None;
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub strides: usize,
    pub initial: BodyState,
    pub mass: MassModel,
    /// Run schedules that fail the stability check anyway.
    pub allow_unstable: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            strides: 10,
            initial: BodyState::default(),
            mass: MassModel::default(),
            allow_unstable: false,
        }
    }
}

fn world_contacts(set: &ContactSet, body: &BodyState) -> ContactSet {
    set.transformed(body.orientation, body.position)
}

fn tilt_of(s: &ScheduleSample) -> TiltInput {
    TiltInput::new(s.body_roll, 0.0)
}

/// Integrates `strides` cycles of `g`.
pub fn simulate(g: &GaitSchedule, coast: &CoastModel, opts: &SimOptions) -> Result<Trajectory> {
    if opts.strides == 0 {
        return Err(Error::InvalidParameter("strides must be at least 1".into()));
    }
    let bad = coast.violations();
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }
    let stab = check_schedule_stability(g, &opts.mass)?;
    if !stab.stable() && !opts.allow_unstable {
        return Err(Error::UnstablePhase {
            t: stab.t,
            margin: stab.min_margin,
        });
    }
    let geom = g.context().geometry;
    let tick = g.context().settings.tick;
    let mut body = opts.initial;
    let mut c = body.velocity();
    let mut t = 0.0;
    let mut samples = Vec::new();

    let record = |t: f64, body: BodyState, s: &ScheduleSample| -> Result<TrajectorySample> {
        let st = sample_stability(g, s, &opts.mass)?;
        Ok(TrajectorySample {
            t,
            body,
            contacts: world_contacts(&sample_contacts(g, s), &body),
            support: st.support.mode,
            margin: st.report.margin,
        })
    };
    let first = g.sample_phase(0, 0.0);
    body.tilt = tilt_of(&first);
    samples.push(record(0.0, body, &first)?);

    let steps: Vec<(usize, f64)> = g
        .phases()
        .iter()
        .map(|p| {
            let n = ticks_in(p.duration, tick);
            (n, p.duration / n as f64)
        })
        .collect();

    for _ in 0..opts.strides {
        for (i, phase) in g.phases().iter().enumerate() {
            let (n, dt) = steps[i];
            let (decay, dist) = coast.coast_step(dt);
            let mut pushed = Vec2::zeros();
            let mut pushing_phase = false;
            for k in 0..n {
                let s0 = g.sample_phase(i, k as f64 * dt);
                let s1 = g.sample_phase(i, (k + 1) as f64 * dt);
                let mut stroke = Vec2::zeros();
                let mut pushing = false;
                let mut anchored = false;
                for leg in LegId::ALL {
                    let (a, b) = (s0.legs[leg.index()], s1.legs[leg.index()]);
                    if !(a.grounded && a.contact == ContactMode::Frictional && !a.in_transition) {
                        continue;
                    }
                    let dx = b.target.x - a.target.x;
                    if dx.abs() > 1e-15 {
                        let eff = if dx < 0.0 { coast.pull_efficiency } else { 1.0 };
                        let dir = unit(body.orientation + leg.azimuth(&geom));
                        stroke -= dir * (coast.push_gain * eff * dx);
                        pushing = true;
                    } else {
                        anchored = true;
                    }
                }
                let disp = if pushing {
                    pushing_phase = true;
                    pushed += stroke;
                    c * dt + stroke
                } else if anchored {
                    let sp = c.norm();
                    c = if sp > coast.anchor_hold_speed {
                        c * ((sp - coast.anchor_hold_speed) / sp)
                    } else {
                        Vec2::zeros()
                    };
                    Vec2::zeros()
                } else {
                    let d = c * dist;
                    c *= decay;
                    d
                };
                body.position += disp;
                body.speed = disp.norm() / dt;
                if body.speed > REST_SPEED {
                    body.heading = disp.y.atan2(disp.x);
                }
                body.tilt = tilt_of(&s1);
                t += dt;
                samples.push(record(t, body, &s1)?);
            }
            if pushing_phase {
                c += pushed / phase.duration;
            }
        }
    }
    Ok(Trajectory {
        samples,
        stride_period: Some(g.period()),
        strides: opts.strides,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub mps: f64,
    /// Body lengths per second.
    pub blps: f64,
}

/// Net displacement over the whole number of recorded strides divided by
/// their duration.
pub fn average_velocity(traj: &Trajectory, geom: &RobotGeometry) -> Result<Velocity> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let end_t = match traj.stride_period {
        Some(p) if traj.strides > 0 => first.t + p * traj.strides as f64,
        _ => traj.samples.last().map_or(first.t, |s| s.t),
    };
    let last = traj
        .samples
        .iter()
        .rev()
        .find(|s| s.t <= end_t + 1e-9)
        .unwrap_or(first);
    let dt = last.t - first.t;
    if dt <= 0.0 {
        return Err(Error::InvalidParameter(
            "trajectory shorter than one stride".into(),
        ));
    }
    let mps = (last.body.position - first.body.position).norm() / dt;
    Ok(Velocity {
        mps,
        blps: mps / geom.body_length,
    })
}

/// Selects a different leading leg: the heading rotates by the azimuth
/// difference while the body orientation stays put.
pub fn change_heading(
    state: &BodyState,
    from: LegId,
    to: LegId,
    geom: &RobotGeometry,
) -> BodyState {
    BodyState {
        heading: wrap_angle(state.heading + to.azimuth(geom) - from.azimuth(geom)),
        ..*state
    }
}

/// Straight run-in and run-out added around a pivot so the turn is bounded
/// by path segments on both sides (s).
pub const PIVOT_LEAD_TIME: f64 = 0.2;

/// Swings the body about the planted foot of `p.anchor_leg`. Heading and
/// orientation rotate together by `v_t * T / r`, where `v_t` is the speed
/// component tangential to the anchor.
pub fn simulate_pivot(
    initial: &BodyState,
    p: &PivotManeuver,
    coast: &CoastModel,
    ctx: &GaitContext,
    mass: &MassModel,
) -> Result<Trajectory> {
    if initial.speed.is_nan() || initial.speed <= coast.pivot_min_speed {
        return Err(Error::NoMomentum {
            speed: initial.speed,
            threshold: coast.pivot_min_speed,
        });
    }
    let g = maneuver_pivot(p, ctx)?;
    let st = check_schedule_stability(&g, mass)?;
    let geom = &ctx.geometry;
    let tick = ctx.settings.tick;
    let r = p.anchor_distance;
    let anchor_dir = unit(initial.orientation + p.anchor_leg.azimuth(geom));
    let v = unit(initial.heading) * initial.speed;
    let v_t = anchor_dir.x * v.y - anchor_dir.y * v.x;
    if v_t.abs() <= coast.pivot_min_speed {
        return Err(Error::NoMomentum {
            speed: v_t.abs(),
            threshold: coast.pivot_min_speed,
        });
    }
    // The body sits at -r·anchor_dir from the anchor; crossing the radial
    // direction with the velocity gives the turn sense.
    let sense = -v_t.signum();
    let omega = sense * v_t.abs() / r;

    let rolling = g.sample_phase(0, 0.0);
    let body_contacts = sample_contacts(&g, &rolling);
    let mut samples = Vec::new();
    let mut body = *initial;
    let mut t = 0.0;
    let push = |t: f64, body: BodyState, samples: &mut Vec<TrajectorySample>, planted: bool| {
        let contacts = if planted {
            world_contacts(&body_contacts, &body)
        } else {
            let rolling_only: Vec<ContactPoint> = body_contacts
                .points()
                .iter()
                .map(|c| ContactPoint {
                    label: match c.label {
                        ContactLabel::Foot(l, _) => ContactLabel::Foot(l, ContactMode::Rolling),
                        other => other,
                    },
                    position: c.position,
                })
                .collect();
            world_contacts(
                &ContactSet::new(rolling_only).expect("valid pivot contacts"),
                &body,
            )
        };
        samples.push(TrajectorySample {
            t,
            body,
            contacts,
            support: if planted {
                st.support
            } else {
                SupportMode::AllFeet
            },
            margin: st.min_margin,
        });
    };
    push(t, body, &mut samples, false);

    let straight = |body: &mut BodyState, t: &mut f64, samples: &mut Vec<TrajectorySample>| {
        let n = ticks_in(PIVOT_LEAD_TIME, tick);
        let dt = PIVOT_LEAD_TIME / n as f64;
        for _ in 0..n {
            body.position += unit(body.heading) * (body.speed * dt);
            *t += dt;
            push(*t, *body, samples, false);
        }
    };
    straight(&mut body, &mut t, &mut samples);

    let anchor = body.position + anchor_dir * r;
    let n = ticks_in(p.contact_duration, tick);
    let dt = p.contact_duration / n as f64;
    let rel0 = body.position - anchor;
    let (psi0, h0) = (body.orientation, body.heading);
    body.speed = v_t.abs();
    for k in 1..=n {
        let th = omega * dt * k as f64;
        let (s, c) = th.sin_cos();
        body.position = anchor + Vec2::new(c * rel0.x - s * rel0.y, s * rel0.x + c * rel0.y);
        body.orientation = wrap_angle(psi0 + th);
        body.heading = wrap_angle(h0 + th);
        t += dt;
        push(t, body, &mut samples, k < n);
    }
    // Leave along the tangent.
    let rel = body.position - anchor;
    body.heading = wrap_angle(rel.y.atan2(rel.x) + sense * PI / 2.0);
    straight(&mut body, &mut t, &mut samples);
    Ok(Trajectory {
        samples,
        stride_period: None,
        strides: 0,
    })
}

/// Radius of the largest circle inscribed on the inner side of the turn,
/// found by golden-section search along the inner normal at the midpoint of
/// the turn (the stretch between the first and last vertex where the
/// heading changes). `None` for a straight path; 0 for a single corner.
pub fn turning_radius(traj: &Trajectory) -> Option<f64> {
    turning_radius_of_path(&traj.positions())
}

pub fn turning_radius_of_path(points: &[Vec2]) -> Option<f64> {
    const MIN_STEP: f64 = 1e-9;
    const TURN_EPS: f64 = 1e-9;
    let mut path: Vec<Vec2> = Vec::with_capacity(points.len());
    for &p in points {
        if path.last().is_none_or(|q: &Vec2| (p - q).norm() > MIN_STEP) {
            path.push(p);
        }
    }
    if path.len() < 3 {
        return None;
    }
    let dirs: Vec<f64> = path
        .windows(2)
        .map(|w| (w[1].y - w[0].y).atan2(w[1].x - w[0].x))
        .collect();
    let mut turning = Vec::new();
    let mut total = 0.0;
    let mut sharpest: f64 = 0.0;
    for i in 1..dirs.len() {
        let d = wrap_angle(dirs[i] - dirs[i - 1]);
        if d.abs() > TURN_EPS {
            turning.push(i);
            total += d;
            sharpest = sharpest.max(d.abs());
        }
    }
    let (first, last) = (*turning.first()?, *turning.last()?);
    if first == last {
        return Some(0.0);
    }
    let turn = &path[first..=last];
    let lengths: Vec<f64> = turn.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let half = lengths.iter().sum::<f64>() / 2.0;
    let point_at = |d: f64| {
        let mut acc = 0.0;
        for (i, &l) in lengths.iter().enumerate() {
            if acc + l >= d {
                return turn[i] + (turn[i + 1] - turn[i]) * ((d - acc) / l);
            }
            acc += l;
        }
        turn[turn.len() - 1]
    };
    let mid = point_at(half);
    // A chord symmetric about the midpoint is parallel to the local tangent
    // of an arc, unlike the segment the midpoint happens to fall on.
    let tangent = (point_at(1.5 * half) - point_at(0.5 * half)).normalize();
    // Left normal for a counter-clockwise turn.
    let normal = Vec2::new(-tangent.y, tangent.x) * total.signum();
    let dist = |c: Vec2, pts: &[Vec2]| {
        pts.windows(2)
            .map(|w| seg_dist(c, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    };
    // Candidate circles touch the path at the turn midpoint. A polyline
    // arc sits inside its circle by a factor cos(Δ/2), so that much slack
    // is allowed before a circle counts as crossing the path.
    let slack = 1.0 - (0.5 * sharpest).cos() + 1e-12;
    let score = |t: f64| {
        let c = mid + normal * t;
        if dist(c, &path) >= t * (1.0 - slack) {
            t
        } else {
            -t
        }
    };
    let extent = {
        let (mut lo, mut hi) = (path[0], path[0]);
        for p in &path {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm().max(MIN_STEP)
    };
    let (mut a, mut b) = (0.0, extent);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (score(x1), score(x2));
    while b - a > 1e-5 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = score(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = score(x1);
        }
    }
    Some(score(a).max(0.0))
}

fn seg_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    let t = if l2 > 0.0 {
        ((p - a).dot(&ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

/// Free run on an inclined plane; positions are measured in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclineRun {
    pub incline: f64,
    /// Body-independent world direction of steepest descent.
    pub downhill_azimuth: f64,
    pub duration: f64,
    /// All feet frictional instead of all rolling.
    pub braked: bool,
}

/// Rolls (or brakes) on an incline. Rolling follows
/// `v' = g·sin(incline) − k·v`, integrated exactly per tick.
pub fn incline_roll(
    initial: &BodyState,
    run: &InclineRun,
    coast: &CoastModel,
    ctx: &GaitContext,
) -> Result<Trajectory> {
    if !(run.incline.is_finite() && (0.0..PI / 2.0).contains(&run.incline)) {
        return Err(Error::InvalidParameter(format!(
            "incline must be in [0, π/2) (got {})",
            run.incline
        )));
    }
    if !(run.duration.is_finite() && run.duration > 0.0) {
        return Err(Error::InvalidParameter("duration must be positive".into()));
    }
    let hold = run.braked && run.incline.tan() <= coast.friction;
    if run.braked && !hold {
        return Err(Error::Infeasible {
            reasons: vec![format!(
                "incline {:.4} rad exceeds the brake friction limit atan({}) ",
                run.incline, coast.friction
            )],
        });
    }
    let g = if run.braked {
        crate::gait::maneuver_brake(ctx)?
    } else {
        crate::gait::maneuver_stand(ctx)?
    };
    let st = check_schedule_stability(&g, &MassModel::default())?;
    let s = g.sample_phase(0, 0.0);
    let contacts = sample_contacts(&g, &s);
    let tick = ctx.settings.tick;
    let n = ticks_in(run.duration, tick);
    let dt = run.duration / n as f64;
    let accel = unit(run.downhill_azimuth) * (GRAVITY * run.incline.sin());
    let k = coast.decay_rate;
    let mut body = *initial;
    let mut c = if hold { Vec2::zeros() } else { body.velocity() };
    if hold {
        body.speed = 0.0;
    }
    let mut samples = vec![TrajectorySample {
        t: 0.0,
        body,
        contacts: world_contacts(&contacts, &body),
        support: st.support,
        margin: st.min_margin,
    }];
    for i in 1..=n {
        if !hold {
            let (disp, next) = if k == 0.0 {
                (c * dt + accel * (0.5 * dt * dt), c + accel * dt)
            } else if k.is_infinite() {
                (Vec2::zeros(), Vec2::zeros())
            } else {
                let term = accel / k;
                let e = (-k * dt).exp();
                let f = -(-k * dt).exp_m1() / k;
                (term * dt + (c - term) * f, term + (c - term) * e)
            };
            body.position += disp;
            c = next;
            body.speed = c.norm();
            if body.speed > REST_SPEED {
                body.heading = c.y.atan2(c.x);
            }
        }
        samples.push(TrajectorySample {
            t: i as f64 * dt,
            body,
            contacts: world_contacts(&contacts, &body),
            support: st.support,
            margin: st.min_margin,
        });
    }
    Ok(Trajectory {
        samples,
        stride_period: None,
        strides: 0,
    })
}

/// Average speed of a gait over `strides` cycles from rest.
pub fn gait_speed(g: &GaitSchedule, coast: &CoastModel, strides: usize) -> Result<f64> {
    let traj = simulate(
        g,
        coast,
        &SimOptions {
            strides,
            ..SimOptions::default()
        },
    )?;
    Ok(average_velocity(&traj, &g.context().geometry)?.mps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTargets {
    pub scoot_mps: f64,
    pub skate_mps: f64,
    pub strides: usize,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        CalibrationTargets {
            scoot_mps: 0.16,
            skate_mps: 0.56,
            strides: 10,
        }
    }
}

/// Fits `decay_rate` and `push_gain` so the default scoot and skate reach
/// the target speeds: bisection on the speed ratio in log(decay_rate), then
/// a gain rescale, repeated until both settle.
pub fn calibrate(
    scoot: &GaitSchedule,
    skate: &GaitSchedule,
    base: &CoastModel,
    targets: &CalibrationTargets,
) -> Result<CoastModel> {
    let mut model = *base;
    let speeds = |m: &CoastModel| -> Result<(f64, f64)> {
        Ok((
            gait_speed(scoot, m, targets.strides)?,
            gait_speed(skate, m, targets.strides)?,
        ))
    };
    let want = targets.skate_mps / targets.scoot_mps;
    for _ in 0..6 {
        let ratio = |k: f64| -> Result<f64> {
            let (a, b) = speeds(&CoastModel {
                decay_rate: k,
                ..model
            })?;
            Ok(b / a)
        };
        let (mut lo, mut hi) = (-6f64, 6f64);
        if ratio(hi.exp())? > want || ratio(lo.exp())? < want {
            return Err(Error::Infeasible {
                reasons: vec![format!(
                    "no decay rate in [e^-6, e^6] gives speed ratio {want:.3}"
                )],
            });
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            // The ratio falls as decay grows.
            if ratio(mid.exp())? > want {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        model.decay_rate = (0.5 * (lo + hi)).exp();
        let (a, _) = speeds(&model)?;
        model.push_gain = (model.push_gain * targets.scoot_mps / a).min(1.0);
    }
    Ok(model)
}
