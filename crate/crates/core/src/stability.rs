//! Support classification and quasi-static stability margins.
//!
//! All geometry here lives in the horizontal ground plane of the body frame:
//! the origin is the ground projection of the sphere center and leg `i`
//! points along its azimuth.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{ContactMode, GaitSchedule, LegId, ScheduleSample};
use crate::kinematics::{leg_points, JointAngles, RobotGeometry};

pub type Vec2 = Vector2<f64>;

/// Contact points closer than this are considered the same point.
pub const MIN_CONTACT_SEPARATION: f64 = 1e-3;

/// Unit vector at angle `a`.
pub fn unit(a: f64) -> Vec2 {
    Vec2::new(a.cos(), a.sin())
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactLabel {
    Foot(LegId, ContactMode),
    Sphere,
    /// The rim of the central cage; a line contact, so it may contribute
    /// two points (the ends of the touching segment).
    CageEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPoint {
    pub label: ContactLabel,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactSet {
    points: Vec<ContactPoint>,
}

impl ContactSet {
    /// 1 to 5 distinct points with at most one contact per foot and one
    /// sphere.
    pub fn new(points: Vec<ContactPoint>) -> Result<ContactSet> {
        if points.is_empty() || points.len() > 5 {
            return Err(Error::InvalidParameter(format!(
                "a contact set holds 1 to 5 points (got {})",
                points.len()
            )));
        }
        for (i, a) in points.iter().enumerate() {
            if !(a.position.x.is_finite() && a.position.y.is_finite()) {
                return Err(Error::InvalidParameter(
                    "contact point is not finite".into(),
                ));
            }
            for b in &points[i + 1..] {
                if (a.position - b.position).norm() <= MIN_CONTACT_SEPARATION {
                    return Err(Error::InvalidParameter(format!(
                        "contacts {:?} and {:?} are closer than 1 mm",
                        a.label, b.label
                    )));
                }
                let same = match (a.label, b.label) {
                    (ContactLabel::Foot(x, _), ContactLabel::Foot(y, _)) => x == y,
                    (ContactLabel::Sphere, ContactLabel::Sphere) => true,
                    _ => false,
                };
                if same {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate contact {:?}",
                        a.label
                    )));
                }
            }
        }
        if points
            .iter()
            .filter(|p| p.label == ContactLabel::CageEdge)
            .count()
            > 2
        {
            return Err(Error::InvalidParameter(
                "at most two cage-edge points".into(),
            ));
        }
        Ok(ContactSet { points })
    }

    pub fn points(&self) -> &[ContactPoint] {
        &self.points
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn transformed(&self, rotation: f64, translation: Vec2) -> ContactSet {
        let (s, c) = rotation.sin_cos();
        ContactSet {
            points: self
                .points
                .iter()
                .map(|p| ContactPoint {
                    label: p.label,
                    position: Vec2::new(
                        c * p.position.x - s * p.position.y,
                        s * p.position.x + c * p.position.y,
                    ) + translation,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportMode {
    AllFeet,
    TwoFeetPlusSphere,
    SpherePlusCage,
    Braked,
    Airborne,
}

impl SupportMode {
    pub fn name(self) -> &'static str {
        match self {
            SupportMode::AllFeet => "all_feet",
            SupportMode::TwoFeetPlusSphere => "two_feet_sphere",
            SupportMode::SpherePlusCage => "sphere_cage",
            SupportMode::Braked => "braked",
            SupportMode::Airborne => "airborne",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportClass {
    pub mode: SupportMode,
    /// Set when the labels do not match any taxon exactly and the nearest
    /// one was chosen.
    pub warning: bool,
}

/// Labels the support configuration.
pub fn classify_support(contacts: &ContactSet) -> SupportClass {
    let mut feet = 0;
    let mut frictional = 0;
    let mut sphere = false;
    let mut cage = false;
    for p in contacts.points() {
        match p.label {
            ContactLabel::Foot(_, mode) => {
                feet += 1;
                frictional += usize::from(mode == ContactMode::Frictional);
            }
            ContactLabel::Sphere => sphere = true,
            ContactLabel::CageEdge => cage = true,
        }
    }
    let exact = |mode| SupportClass {
        mode,
        warning: false,
    };
    let near = |mode| SupportClass {
        mode,
        warning: true,
    };
    match (feet, sphere, cage) {
        (0, true, true) => exact(SupportMode::SpherePlusCage),
        (_, _, true) => near(SupportMode::SpherePlusCage),
        (3, _, false) if frictional == 3 => exact(SupportMode::Braked),
        (3, _, false) => exact(SupportMode::AllFeet),
        (2, true, false) => exact(SupportMode::TwoFeetPlusSphere),
        (0, true, false) => exact(SupportMode::Airborne),
        (2, false, false) | (1, true, false) => near(SupportMode::TwoFeetPlusSphere),
        _ => near(SupportMode::Airborne),
    }
}

/// Convex support region; degenerate hulls have one or two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    /// Counter-clockwise, no repeated or collinear vertices.
    pub vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices).abs()
    }

    /// Signed distance from `p` to the region: positive strictly inside,
    /// negative outside. Points and segments enclose nothing, so the result
    /// is minus the distance to them.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::NEG_INFINITY,
            1 => -(p - v[0]).norm(),
            2 => -segment_distance(p, v[0], v[1]),
            n => {
                let mut inside = true;
                let mut dist = f64::INFINITY;
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if cross(b - a, p - a) < 0.0 {
                        inside = false;
                    }
                    dist = dist.min(segment_distance(p, a, b));
                }
                if inside {
                    dist
                } else {
                    -dist
                }
            }
        }
    }
}

fn shoelace(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>() * 0.5
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Convex hull by Andrew's monotone chain.
pub fn convex_hull(points: &[Vec2]) -> Polygon {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Polygon { vertices: pts };
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if cross(b - a, p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    Polygon { vertices: hull }
}

pub fn support_polygon(contacts: &ContactSet) -> Polygon {
    convex_hull(&contacts.positions())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub margin: f64,
}

pub fn stability_margin(com: Vec2, contacts: &ContactSet) -> StabilityReport {
    let margin = support_polygon(contacts).signed_distance(com);
    StabilityReport {
        stable: margin > 0.0,
        margin,
    }
}

/// Lumped-mass model of the robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassModel {
    /// Central structure and control hub.
    pub hub: f64,
    pub sphere: f64,
    /// Each leg.
    pub leg: f64,
    /// Height of the hub mass above the sphere center (m).
    pub hub_height: f64,
}

impl Default for MassModel {
    fn default() -> Self {
        MassModel {
            hub: 0.5,
            sphere: 0.3,
            leg: 0.0667,
            hub_height: 0.15,
        }
    }
}

impl MassModel {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, m) in [
            ("mass.hub", self.hub),
            ("mass.sphere", self.sphere),
            ("mass.leg", self.leg),
        ] {
            if !(m.is_finite() && m >= 0.0) {
                v.push(format!("{name} must be non-negative (got {m})"));
            }
        }
        if self.total().is_nan() || self.total() <= 0.0 {
            v.push("total mass must be positive".into());
        }
        if !(self.hub_height.is_finite() && self.hub_height >= 0.0) {
            v.push(format!(
                "mass.hub_height must be non-negative (got {})",
                self.hub_height
            ));
        }
        v
    }

    pub fn total(&self) -> f64 {
        self.hub + self.sphere + 3.0 * self.leg
    }

    /// Ground projection of the center of mass, body frame. `hub_offset` is
    /// the horizontal displacement of the hub mass caused by body roll.
    pub fn com(&self, angles: &[JointAngles; 3], hub_offset: Vec2, geom: &RobotGeometry) -> Vec2 {
        let mut m = hub_offset * self.hub;
        for leg in LegId::ALL {
            let p = leg_points(angles[leg.index()], geom);
            let x = (p.shoulder.x + 2.0 * p.knee.x + p.foot.x) / 4.0;
            m += unit(leg.azimuth(geom)) * (x * self.leg);
        }
        m / self.total()
    }
}

/// Horizontal displacement of the hub when the body rolls by `roll` away
/// from `active`.
pub fn hub_offset(roll: f64, active: LegId, mass: &MassModel, geom: &RobotGeometry) -> Vec2 {
    -unit(active.azimuth(geom)) * (mass.hub_height * roll.sin())
}

/// Ground contacts of a schedule sample.
pub fn sample_contacts(g: &GaitSchedule, s: &ScheduleSample) -> ContactSet {
    let geom = &g.context().geometry;
    let mut points = Vec::with_capacity(4);
    for leg in LegId::ALL {
        let l = s.legs[leg.index()];
        if l.grounded {
            points.push(ContactPoint {
                label: ContactLabel::Foot(leg, l.contact),
                position: unit(leg.azimuth(geom)) * l.target.x,
            });
        }
    }
    if s.sphere_engaged {
        points.push(ContactPoint {
            label: ContactLabel::Sphere,
            position: Vec2::zeros(),
        });
    }
    // Valid schedules keep feet well apart; fall back to an unchecked set
    // only if a custom schedule puts a foot on the sphere contact.
    ContactSet::new(points.clone()).unwrap_or(ContactSet { points })
}

/// Stability of one schedule sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStability {
    pub support: SupportClass,
    pub report: StabilityReport,
    pub com: Vec2,
}

pub fn sample_stability(
    g: &GaitSchedule,
    s: &ScheduleSample,
    mass: &MassModel,
) -> Result<SampleStability> {
    let geom = &g.context().geometry;
    let angles = g.joint_angles_of(s)?;
    let com = mass.com(
        &angles,
        hub_offset(s.body_roll, g.active_leg(), mass, geom),
        geom,
    );
    let contacts = sample_contacts(g, s);
    Ok(SampleStability {
        support: classify_support(&contacts),
        report: stability_margin(com, &contacts),
        com,
    })
}

/// Worst point of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleStability {
    pub min_margin: f64,
    pub phase_index: usize,
    pub t: f64,
    pub support: SupportMode,
}

impl ScheduleStability {
    pub fn stable(&self) -> bool {
        self.min_margin > 0.0
    }
}

/// Minimum margin over every control tick of one cycle (ticks aligned to
/// phase starts, plus the end of each phase).
pub fn check_schedule_stability(g: &GaitSchedule, mass: &MassModel) -> Result<ScheduleStability> {
    let tick = g.context().settings.tick;
    let mut worst: Option<ScheduleStability> = None;
    for (i, (phase, start)) in g.phases().iter().zip(g.phase_starts()).enumerate() {
        let n = crate::gait::ticks_in(phase.duration, tick);
        for k in 0..=n {
            let local = phase.duration * k as f64 / n as f64;
            let s = g.sample_phase(i, local);
            let st = sample_stability(g, &s, mass)?;
            if worst.is_none_or(|w| st.report.margin < w.min_margin) {
                worst = Some(ScheduleStability {
                    min_margin: st.report.margin,
                    phase_index: i,
                    t: start + local,
                    support: st.support.mode,
                });
            }
        }
    }
    Ok(worst.expect("schedule has at least one phase"))
}
