//! Analytic single-leg kinematics.
//!
//! Every leg works in its own vertical plane: `x` is horizontal and points
//! radially outward along the leg's azimuth, `y` is vertical and points up.
//! The origin is the center of the central sphere. The whole body (without
//! the sphere) may rotate about the sphere center inside that plane; the
//! rotation enters the solver only through the tilt angle `q0`, with
//! `q0 = π/2` meaning "untilted".
//!
//! The inverse solution always takes the elbow-up branch, so the knee angle
//! `q2` is never positive.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Joint, Result};

/// Arguments of `acos` this close to ±1 are clamped instead of rejected.
pub const ACOS_CLAMP_TOLERANCE: f64 = 1e-12;

/// Slack used when comparing solved joint angles against servo limits.
const LIMIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotGeometry {
    /// Vertical distance from the sphere center to the hip plane (m).
    pub l0: f64,
    /// Upper leg link (m).
    pub l1: f64,
    /// Lower leg link (m).
    pub l2: f64,
    /// Horizontal offset of the hip joint from the body axis (m).
    pub d: f64,
    pub sphere_radius: f64,
    /// Length used to normalise speeds into body lengths per second.
    pub body_length: f64,
    /// Hip height above the ground in the standing pose.
    pub hip_height: f64,
    /// Radial foot placement of the standing pose.
    pub stance_radius: f64,
    /// Leg azimuths in the body frame (rad), 120° apart.
    pub leg_azimuths: [f64; 3],
}

impl Default for RobotGeometry {
    fn default() -> Self {
        RobotGeometry {
            l0: 0.10,
            l1: 0.17,
            l2: 0.17,
            d: 0.03,
            sphere_radius: 0.100,
            body_length: 0.225,
            hip_height: 0.20,
            stance_radius: 0.12,
            leg_azimuths: [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0],
        }
    }
}

impl RobotGeometry {
    /// Distance from the sphere center to the hip joint.
    pub fn shoulder_radius(&self) -> f64 {
        self.l0.hypot(self.d)
    }

    pub fn max_reach(&self) -> f64 {
        self.l1 + self.l2
    }

    pub fn min_reach(&self) -> f64 {
        (self.l1 - self.l2).abs()
    }

    /// Collects every violated invariant. `limits` is used for the
    /// non-empty-workspace check.
    pub fn violations(&self, limits: &JointLimits) -> Vec<String> {
        let mut out = Vec::new();
        let lengths = [
            ("l0", self.l0),
            ("l1", self.l1),
            ("l2", self.l2),
            ("d", self.d),
            ("sphere_radius", self.sphere_radius),
            ("body_length", self.body_length),
            ("hip_height", self.hip_height),
            ("stance_radius", self.stance_radius),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!(
                    "geometry.{name} must be a positive length (got {v})"
                ));
            }
        }
        let a = self.leg_azimuths;
        if a.iter().any(|v| !v.is_finite()) {
            out.push("geometry.leg_azimuths must be finite".to_string());
        } else {
            let step = 2.0 * PI / 3.0;
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                let gap = wrap_angle(a[j] - a[i] - step);
                if gap.abs() > 1e-9 {
                    out.push(format!(
                        "geometry.leg_azimuths must be 120° apart (legs {i} and {j} differ by {:.6} rad)",
                        wrap_angle(a[j] - a[i])
                    ));
                    break;
                }
            }
        }
        if out.is_empty() && !workspace_non_empty(self, limits) {
            out.push("reachable workspace is empty for these link lengths and joint limits".into());
        }
        out
    }
}

/// Servo-imposed joint ranges, in joint radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimits {
    pub hip: (f64, f64),
    pub knee: (f64, f64),
}

impl Default for JointLimits {
    fn default() -> Self {
        JointLimits {
            hip: (-FRAC_PI_2, FRAC_PI_2),
            knee: (-PI, 0.0),
        }
    }
}

impl JointLimits {
    /// No limits beyond the elbow-up branch itself.
    pub fn unbounded() -> Self {
        JointLimits {
            hip: (-PI, PI),
            knee: (-PI, 0.0),
        }
    }

    fn check(&self, angles: &JointAngles) -> Result<()> {
        for (joint, angle, (min, max)) in [
            (Joint::Hip, angles.q1, self.hip),
            (Joint::Knee, angles.q2, self.knee),
        ] {
            if angle < min - LIMIT_TOLERANCE || angle > max + LIMIT_TOLERANCE {
                return Err(Error::JointLimit {
                    joint,
                    angle,
                    min,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// Body attitude: pitch `theta` and yaw `psi`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TiltInput {
    pub theta: f64,
    pub psi: f64,
}

impl TiltInput {
    pub fn new(theta: f64, psi: f64) -> Self {
        TiltInput { theta, psi }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("theta", self.theta), ("psi", self.psi)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tilt {name} is not finite"
                )));
            }
            if v.abs() > FRAC_PI_2 + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "tilt {name} = {v} exceeds π/2, outside the quasi-static model"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAngles {
    /// Body tilt in the leg plane (π/2 = untilted).
    pub q0: f64,
    /// Hip.
    pub q1: f64,
    /// Knee; never positive.
    pub q2: f64,
}

/// Foot position in the leg plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FootTarget {
    pub x: f64,
    pub y: f64,
}

impl FootTarget {
    pub const fn new(x: f64, y: f64) -> Self {
        FootTarget { x, y }
    }

    pub fn lerp(self, to: FootTarget, f: f64) -> FootTarget {
        FootTarget {
            x: self.x + (to.x - self.x) * f,
            y: self.y + (to.y - self.y) * f,
        }
    }

    pub fn distance(self, other: FootTarget) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Result of a reachability query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub contained: bool,
    /// Signed distance to the nearest boundary of the reach annulus
    /// (positive inside).
    pub margin: f64,
}

/// Points along the kinematic chain of one leg, in the leg plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPoints {
    pub shoulder: FootTarget,
    pub knee: FootTarget,
    pub foot: FootTarget,
}

/// Tilt of the body relative to the vertical from measured pitch and yaw.
///
/// The `l0` factors of the closed form are kept so the cancellation is
/// explicit; the result does not depend on `l0`.
pub fn tilt_angle(tilt: TiltInput, geom: &RobotGeometry) -> Result<f64> {
    tilt.validate()?;
    let l0 = geom.l0;
    let a = l0 * tilt.psi.cos() * tilt.theta.sin();
    let b = l0 * tilt.psi.sin();
    let arg = (a * a + b * b).sqrt() / l0;
    clamped_acos(arg)
}

/// Rotation of the shoulder about the sphere center for a given tilt.
fn shoulder_point(q0: f64, geom: &RobotGeometry) -> FootTarget {
    let gamma = q0 - (geom.d / geom.l0).atan();
    let r = geom.shoulder_radius();
    FootTarget::new(gamma.cos() * r, gamma.sin() * r)
}

fn clamped_acos(arg: f64) -> Result<f64> {
    if !arg.is_finite() {
        return Err(Error::Domain(format!("acos argument {arg} is not finite")));
    }
    if arg.abs() > 1.0 + ACOS_CLAMP_TOLERANCE {
        return Err(Error::Domain(format!(
            "acos argument {arg} outside [-1, 1]"
        )));
    }
    Ok(arg.clamp(-1.0, 1.0).acos())
}

fn check_q0(q0: f64) -> Result<()> {
    if !q0.is_finite() || !(0.0..=PI).contains(&q0) {
        return Err(Error::InvalidParameter(format!("q0 = {q0} outside [0, π]")));
    }
    Ok(())
}

/// Elbow-up solution without servo limits. Errors only when the target is
/// outside the reach annulus.
pub fn solve_planar(target: FootTarget, q0: f64, geom: &RobotGeometry) -> Result<JointAngles> {
    check_q0(q0)?;
    if !(target.x.is_finite() && target.y.is_finite()) {
        return Err(Error::InvalidParameter("foot target is not finite".into()));
    }
    let s = shoulder_point(q0, geom);
    let x1 = target.x - s.x;
    let y1 = target.y - s.y;
    let (l1, l2) = (geom.l1, geom.l2);
    let arg = (x1 * x1 + y1 * y1 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    let q2 = -clamped_acos(arg).map_err(|_| Error::Unreachable {
        x: target.x,
        y: target.y,
    })?;
    let q1 = FRAC_PI_2 - q0 - y1.atan2(x1) + (l2 * q2.sin()).atan2(l1 + l2 * q2.cos());
    Ok(JointAngles {
        q0,
        q1: wrap_angle(q1),
        q2,
    })
}

/// Inverse kinematics for one leg, honoring servo limits.
pub fn leg_ik(
    target: FootTarget,
    q0: f64,
    geom: &RobotGeometry,
    limits: &JointLimits,
) -> Result<JointAngles> {
    let angles = solve_planar(target, q0, geom)?;
    limits.check(&angles)?;
    Ok(angles)
}

/// Forward kinematics; the exact inverse of [`solve_planar`] on the
/// elbow-up branch.
pub fn leg_fk(angles: JointAngles, geom: &RobotGeometry) -> FootTarget {
    leg_points(angles, geom).foot
}

pub fn leg_points(angles: JointAngles, geom: &RobotGeometry) -> LegPoints {
    let shoulder = shoulder_point(angles.q0, geom);
    // Absolute direction of the upper link in the leg plane.
    let upper = FRAC_PI_2 - angles.q0 - angles.q1;
    let knee = FootTarget::new(
        shoulder.x + geom.l1 * upper.cos(),
        shoulder.y + geom.l1 * upper.sin(),
    );
    let lower = upper + angles.q2;
    let foot = FootTarget::new(
        knee.x + geom.l2 * lower.cos(),
        knee.y + geom.l2 * lower.sin(),
    );
    LegPoints {
        shoulder,
        knee,
        foot,
    }
}

/// Reachability of `target`: inside the reach annulus and solvable within
/// the servo limits. Agrees with [`leg_ik`] by construction.
pub fn workspace_contains(
    target: FootTarget,
    q0: f64,
    geom: &RobotGeometry,
    limits: &JointLimits,
) -> Reach {
    let s = shoulder_point(q0, geom);
    let rho = (target.x - s.x).hypot(target.y - s.y);
    let margin = (rho - geom.min_reach()).min(geom.max_reach() - rho);
    Reach {
        contained: leg_ik(target, q0, geom, limits).is_ok(),
        margin,
    }
}

fn workspace_non_empty(geom: &RobotGeometry, limits: &JointLimits) -> bool {
    let probe = JointAngles {
        q0: FRAC_PI_2,
        q1: 0.5 * (limits.hip.0 + limits.hip.1),
        q2: 0.5 * (limits.knee.0 + limits.knee.1).min(0.0),
    };
    let foot = leg_fk(probe, geom);
    workspace_contains(foot, FRAC_PI_2, geom, limits).contained
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Per-leg tilt when the body leans by `lean` toward the horizontal
/// direction `lean_azimuth`. Legs in the lean plane see the full angle;
/// legs at other azimuths see its projection.
pub fn lean_q0(leg_azimuth: f64, lean_azimuth: f64, lean: f64) -> f64 {
    FRAC_PI_2 - lean * (leg_azimuth - lean_azimuth).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example_geom() -> RobotGeometry {
        RobotGeometry {
            l0: 0.10,
            l1: 0.12,
            l2: 0.12,
            d: 0.03,
            ..RobotGeometry::default()
        }
    }

    #[test]
    fn tilt_reference_points() {
        let g = RobotGeometry::default();
        assert_eq!(tilt_angle(TiltInput::new(0.0, 0.0), &g).unwrap(), FRAC_PI_2);
        assert_eq!(tilt_angle(TiltInput::new(FRAC_PI_2, 0.0), &g).unwrap(), 0.0);
    }

    #[test]
    fn tilt_golden_value() {
        // acos(sqrt(cos²(0.2)·sin²(0.1) + sin²(0.2))), evaluated with mpmath at 50 digits.
        let expected = 1.347_488_867_304_882_5;
        let got = tilt_angle(TiltInput::new(0.1, 0.2), &RobotGeometry::default()).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-14);
    }

    #[test]
    fn tilt_rejects_non_finite_and_out_of_range() {
        let g = RobotGeometry::default();
        assert!(tilt_angle(TiltInput::new(f64::NAN, 0.0), &g).is_err());
        assert!(tilt_angle(TiltInput::new(0.0, 2.0), &g).is_err());
    }

    #[test]
    fn fully_extended_and_folded_boundaries() {
        let g = example_geom();
        let s = shoulder_point(FRAC_PI_2, &g);
        let reach = g.l1 + g.l2;
        let ext = FootTarget::new(s.x + reach * 0.6, s.y - reach * 0.8);
        let a = solve_planar(ext, FRAC_PI_2, &g).unwrap();
        assert_abs_diff_eq!(a.q2, 0.0, epsilon = 1e-6);

        let g2 = RobotGeometry { l2: 0.08, ..g };
        let inner = g2.l1 - g2.l2;
        let folded = FootTarget::new(s.x + inner * 0.6, s.y - inner * 0.8);
        let a = solve_planar(folded, FRAC_PI_2, &g2).unwrap();
        assert_abs_diff_eq!(a.q2, -PI, epsilon = 1e-6);
    }

    #[test]
    fn ik_recovers_fk_example() {
        let g = example_geom();
        let target = leg_fk(
            JointAngles {
                q0: FRAC_PI_2,
                q1: 0.3,
                q2: -0.8,
            },
            &g,
        );
        let a = leg_ik(target, FRAC_PI_2, &g, &JointLimits::default()).unwrap();
        assert_abs_diff_eq!(a.q1, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(a.q2, -0.8, epsilon = 1e-12);
    }

    #[test]
    fn zero_joint_pose_is_straight_leg() {
        let g = example_geom();
        let foot = leg_fk(
            JointAngles {
                q0: FRAC_PI_2,
                q1: 0.0,
                q2: 0.0,
            },
            &g,
        );
        // Shoulder sits at (d, l0) when untilted; the straight leg points along +x.
        assert_abs_diff_eq!(foot.x, g.d + g.l1 + g.l2, epsilon = 1e-12);
        assert_abs_diff_eq!(foot.y, g.l0, epsilon = 1e-12);
    }

    #[test]
    fn workspace_degenerate_inner_boundary() {
        let g = example_geom();
        let s = shoulder_point(FRAC_PI_2, &g);
        let r = workspace_contains(s, FRAC_PI_2, &g, &JointLimits::unbounded());
        assert!(r.contained);
        assert_abs_diff_eq!(r.margin, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn workspace_outside_outer_boundary() {
        let g = example_geom();
        let s = shoulder_point(FRAC_PI_2, &g);
        let dist = g.l1 + g.l2 + 0.01;
        let t = FootTarget::new(s.x + dist * 0.6, s.y - dist * 0.8);
        let r = workspace_contains(t, FRAC_PI_2, &g, &JointLimits::default());
        assert!(!r.contained);
        assert_abs_diff_eq!(r.margin, -0.01, epsilon = 1e-12);
        assert!(matches!(
            leg_ik(t, FRAC_PI_2, &g, &JointLimits::default()),
            Err(Error::Unreachable { .. })
        ));
    }

    #[test]
    fn joint_limit_is_reported() {
        let g = example_geom();
        // Reachable, but needs the hip far past +90°.
        let t = leg_fk(
            JointAngles {
                q0: FRAC_PI_2,
                q1: 2.5,
                q2: -0.5,
            },
            &g,
        );
        assert!(solve_planar(t, FRAC_PI_2, &g).is_ok());
        assert!(matches!(
            leg_ik(t, FRAC_PI_2, &g, &JointLimits::default()),
            Err(Error::JointLimit {
                joint: Joint::Hip,
                ..
            })
        ));
    }

    #[test]
    fn default_geometry_is_valid() {
        assert!(RobotGeometry::default()
            .violations(&JointLimits::default())
            .is_empty());
    }

    #[test]
    fn geometry_violations_are_collected() {
        let g = RobotGeometry {
            l1: -1.0,
            sphere_radius: 0.0,
            leg_azimuths: [0.0, 1.0, 2.0],
            ..RobotGeometry::default()
        };
        let v = g.violations(&JointLimits::default());
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(0.5), 0.5);
    }
}
