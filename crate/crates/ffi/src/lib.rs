//! C ABI over `tripod-core`.
//!
//! Objects cross the boundary as opaque handles created and destroyed by
//! this library. Every fallible call returns a [`TripodStatus`]; on failure
//! [`tripod_last_error`] describes the problem. Strings returned through
//! out-parameters must be released with [`tripod_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tripod_core::config::{load_config, RobotConfig};
use tripod_core::export::{export_servo_schedule, trajectory_csv};
use tripod_core::gait::{
    build_scoot, build_shuffle, build_skate, maneuver_brake, maneuver_pivot, maneuver_stand,
    Direction, GaitSchedule,
};
use tripod_core::kinematics::{leg_fk, leg_ik, tilt_angle, FootTarget, JointAngles, TiltInput};
use tripod_core::sim::{average_velocity, simulate, turning_radius, SimOptions, Trajectory};
use tripod_core::stability::check_schedule_stability;
use tripod_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripodStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unreachable = 3,
    JointLimit = 4,
    Infeasible = 5,
    Unstable = 6,
    Io = 7,
    Parse = 8,
    Validation = 9,
    /// A bug inside the library; the handle arguments are still valid.
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripodGait {
    Scoot = 0,
    Shuffle = 1,
    Skate = 2,
    Stand = 3,
    Brake = 4,
    Pivot = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TripodJointAngles {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TripodPoint {
    pub x: f64,
    pub y: f64,
}

/// One trajectory sample. `heading` is NaN while the body is at rest.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TripodSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub orientation: f64,
    pub speed: f64,
    pub margin: f64,
}

/// Robot configuration.
pub struct TripodConfig {
    inner: RobotConfig,
}

/// An immutable gait schedule.
pub struct TripodSchedule {
    inner: GaitSchedule,
}

/// A simulated trajectory.
pub struct TripodTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TripodStatus {
    match e.root() {
        Error::Domain(_) | Error::InvalidParameter(_) => TripodStatus::InvalidArgument,
        Error::Unreachable { .. } => TripodStatus::Unreachable,
        Error::JointLimit { .. } => TripodStatus::JointLimit,
        Error::UnstablePhase { .. } => TripodStatus::Unstable,
        Error::Io(_) => TripodStatus::Io,
        Error::Parse(_) => TripodStatus::Parse,
        Error::Validation(_) => TripodStatus::Validation,
        _ if e.is_infeasible() => TripodStatus::Infeasible,
        _ => TripodStatus::Internal,
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), (TripodStatus, String)>) -> TripodStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            TripodStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TripodStatus::Internal
        }
    }
}

fn core<T>(r: tripod_core::Result<T>) -> Result<T, (TripodStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TripodStatus, String) {
    (TripodStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TripodStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (TripodStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tripod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Built-in default configuration. Never null.
#[no_mangle]
pub extern "C" fn tripod_config_default() -> *mut TripodConfig {
    Box::into_raw(Box::new(TripodConfig {
        inner: RobotConfig::default(),
    }))
}

/// Loads and validates a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tripod_config_load(
    path: *const c_char,
    out: *mut *mut TripodConfig,
) -> TripodStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| {
            (
                TripodStatus::InvalidArgument,
                "path is not UTF-8".to_string(),
            )
        })?;
        let cfg = core(load_config(Path::new(path)))?;
        write(
            out,
            Box::into_raw(Box::new(TripodConfig { inner: cfg })),
            "out",
        )
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tripod_config_free(cfg: *mut TripodConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Body tilt from pitch and yaw (rad).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_tilt_angle(
    cfg: *const TripodConfig,
    theta: f64,
    psi: f64,
    out_q0: *mut f64,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let q0 = core(tilt_angle(TiltInput::new(theta, psi), &cfg.inner.geometry))?;
        write(out_q0, q0, "out_q0")
    })
}

/// Elbow-up inverse kinematics within the configured servo limits.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_leg_ik(
    cfg: *const TripodConfig,
    target: TripodPoint,
    q0: f64,
    out: *mut TripodJointAngles,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let ctx = cfg.inner.context();
        let a = core(leg_ik(
            FootTarget::new(target.x, target.y),
            q0,
            &ctx.geometry,
            &ctx.limits,
        ))?;
        write(
            out,
            TripodJointAngles {
                q0: a.q0,
                q1: a.q1,
                q2: a.q2,
            },
            "out",
        )
    })
}

/// Foot position for the given joint angles.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_leg_fk(
    cfg: *const TripodConfig,
    angles: TripodJointAngles,
    out: *mut TripodPoint,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let a = JointAngles {
            q0: angles.q0,
            q1: angles.q1,
            q2: angles.q2,
        };
        let f = leg_fk(a, &cfg.inner.geometry);
        write(out, TripodPoint { x: f.x, y: f.y }, "out")
    })
}

/// Builds a schedule from the gait parameters stored in `cfg`.
/// `backward` is ignored for the static maneuvers.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_schedule_build(
    cfg: *const TripodConfig,
    gait: TripodGait,
    backward: bool,
    out: *mut *mut TripodSchedule,
) -> TripodStatus {
    guard(|| {
        let cfg = &deref(cfg, "cfg")?.inner;
        let ctx = cfg.context();
        let dir = if backward {
            Direction::Backward
        } else {
            Direction::Forward
        };
        let g = core(match gait {
            TripodGait::Scoot => build_scoot(&cfg.gait.scoot, dir, &ctx),
            TripodGait::Shuffle => build_shuffle(&cfg.gait.shuffle, dir, &ctx),
            TripodGait::Skate => build_skate(&cfg.gait.skate, dir, &ctx),
            TripodGait::Stand => maneuver_stand(&ctx),
            TripodGait::Brake => maneuver_brake(&ctx),
            TripodGait::Pivot => maneuver_pivot(&cfg.gait.pivot, &ctx),
        })?;
        write(
            out,
            Box::into_raw(Box::new(TripodSchedule { inner: g })),
            "out",
        )
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_schedule_period(
    s: *const TripodSchedule,
    out: *mut f64,
) -> TripodStatus {
    guard(|| {
        let s = deref(s, "schedule")?;
        write(out, s.inner.period(), "out")
    })
}

/// Smallest stability margin over one cycle (m); positive means stable.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_schedule_min_margin(
    cfg: *const TripodConfig,
    s: *const TripodSchedule,
    out: *mut f64,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let s = deref(s, "schedule")?;
        let st = core(check_schedule_stability(&s.inner, &cfg.inner.mass))?;
        write(out, st.min_margin, "out")
    })
}

/// Servo CSV of one cycle; free the result with `tripod_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_schedule_servo_csv(
    cfg: *const TripodConfig,
    s: *const TripodSchedule,
    out: *mut *mut c_char,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let s = deref(s, "schedule")?;
        let csv = core(export_servo_schedule(&s.inner, &cfg.inner.servo))?;
        write(out, into_c_string(csv), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tripod_schedule_free(s: *mut TripodSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Simulates `strides` cycles from rest.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_simulate(
    cfg: *const TripodConfig,
    s: *const TripodSchedule,
    strides: usize,
    allow_unstable: bool,
    out: *mut *mut TripodTrajectory,
) -> TripodStatus {
    guard(|| {
        let cfg = &deref(cfg, "cfg")?.inner;
        let s = deref(s, "schedule")?;
        if strides == 0 {
            return Err((
                TripodStatus::InvalidArgument,
                "strides must be at least 1".into(),
            ));
        }
        let opts = SimOptions {
            strides,
            mass: cfg.mass,
            allow_unstable,
            ..SimOptions::default()
        };
        let traj = core(simulate(&s.inner, &cfg.coast, &opts))?;
        write(
            out,
            Box::into_raw(Box::new(TripodTrajectory { inner: traj })),
            "out",
        )
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `t` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_len(t: *const TripodTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.inner.samples.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_sample(
    t: *const TripodTrajectory,
    index: usize,
    out: *mut TripodSample,
) -> TripodStatus {
    guard(|| {
        let t = deref(t, "trajectory")?;
        let s = t.inner.samples.get(index).ok_or_else(|| {
            (
                TripodStatus::InvalidArgument,
                format!(
                    "index {index} out of range ({} samples)",
                    t.inner.samples.len()
                ),
            )
        })?;
        let b = &s.body;
        write(
            out,
            TripodSample {
                t: s.t,
                x: b.position.x,
                y: b.position.y,
                heading: if b.heading_defined() {
                    b.heading
                } else {
                    f64::NAN
                },
                orientation: b.orientation,
                speed: b.speed,
                margin: s.margin,
            },
            "out",
        )
    })
}

/// Average speed in m/s and body lengths per second.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_speed(
    cfg: *const TripodConfig,
    t: *const TripodTrajectory,
    out_mps: *mut f64,
    out_blps: *mut f64,
) -> TripodStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let t = deref(t, "trajectory")?;
        let v = core(average_velocity(&t.inner, &cfg.inner.geometry))?;
        write(out_mps, v.mps, "out_mps")?;
        write(out_blps, v.blps, "out_blps")
    })
}

/// Turning radius of the path (m); infinite when the path never turns.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_turning_radius(
    t: *const TripodTrajectory,
    out: *mut f64,
) -> TripodStatus {
    guard(|| {
        let t = deref(t, "trajectory")?;
        write(
            out,
            turning_radius(&t.inner).unwrap_or(f64::INFINITY),
            "out",
        )
    })
}

/// Trajectory CSV; free the result with `tripod_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_csv(
    t: *const TripodTrajectory,
    out: *mut *mut c_char,
) -> TripodStatus {
    guard(|| {
        let t = deref(t, "trajectory")?;
        write(out, into_c_string(trajectory_csv(&t.inner)), "out")
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tripod_trajectory_free(t: *mut TripodTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn tripod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
