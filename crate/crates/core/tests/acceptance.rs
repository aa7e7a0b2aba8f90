//! Acceptance criteria. Runs without the libtest harness so every
//! criterion prints a PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::time::Instant;

use nalgebra::{Rotation2, Vector2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tripod_core::config::ServoCalibration;
use tripod_core::export::{export_servo_schedule, import_servo_schedule, rows_to_joint_angles};
use tripod_core::gait::*;
use tripod_core::kinematics::*;
use tripod_core::reference::{own_speed_for, MAX_SPEEDS};
use tripod_core::sequences::*;
use tripod_core::sim::*;
use tripod_core::stability::*;
use tripod_core::Error;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ctx() -> GaitContext {
    GaitContext::default()
}

/// Forward kinematics composed from rotations, written independently of
/// the library: the shoulder sits at `(d, l0)` in the body frame, which is
/// tilted by `q0 - π/2`; the links follow at absolute angle
/// `π/2 - q0 - q1` and then `+ q2`.
fn oracle_fk(q0: f64, q1: f64, q2: f64, g: &RobotGeometry) -> Vector2<f64> {
    let body = Rotation2::new(q0 - FRAC_PI_2);
    let shoulder = body * Vector2::new(g.d, g.l0);
    let upper = Rotation2::new(FRAC_PI_2 - q0 - q1);
    let lower = upper * Rotation2::new(q2);
    shoulder + upper * Vector2::new(g.l1, 0.0) + lower * Vector2::new(g.l2, 0.0)
}

fn oracle_shoulder(q0: f64, g: &RobotGeometry) -> Vector2<f64> {
    Rotation2::new(q0 - FRAC_PI_2) * Vector2::new(g.d, g.l0)
}

/// Crossing-number point-in-polygon test.
fn ray_cast_inside(p: Vector2<f64>, poly: &[Vector2<f64>]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn c1_ik_fk_round_trip(stats: &mut IkStats) -> Outcome {
    let g = RobotGeometry::default();
    let limits = JointLimits::default();
    let mut rng = StdRng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for q0 in [0.0, FRAC_PI_6, FRAC_PI_3, FRAC_PI_2] {
        let s = oracle_shoulder(q0, &g);
        let (rmin, rmax) = ((g.l1 - g.l2).abs(), g.l1 + g.l2);
        let mut accepted = 0;
        let mut draws = 0;
        while accepted < 1000 {
            draws += 1;
            ensure(
                draws < 200_000,
                format!("q0={q0}: too few reachable samples"),
            )?;
            // Area-uniform sample of the reach annulus around the shoulder.
            let rho = rng.gen_range(rmin * rmin..rmax * rmax).sqrt();
            let phi = rng.gen_range(-PI..PI);
            let t = s + Vector2::new(rho * phi.cos(), rho * phi.sin());
            let target = FootTarget::new(t.x, t.y);
            match leg_ik(target, q0, &g, &limits) {
                Ok(a) => {
                    accepted += 1;
                    stats.calls += 1;
                    if a.q2 > 0.0 {
                        stats.violations += 1;
                    }
                    let f = oracle_fk(a.q0, a.q1, a.q2, &g);
                    worst = worst.max((f - t).norm());
                }
                // Inside the annulus only the servo limits may refuse.
                Err(Error::JointLimit { .. }) => {}
                Err(e) => return Err(format!("q0={q0}: unexpected error {e}")),
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(worst < 1e-9, format!("max error {worst:.3e} m"))?;
    ensure(elapsed < 1.0, format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "4000 targets, max error {worst:.2e} m, {elapsed:.3} s"
    ))
}

#[derive(Default)]
struct IkStats {
    calls: usize,
    violations: usize,
}

fn c2_elbow_up(stats: &mut IkStats) -> Outcome {
    // Extra sweep over arbitrary tilts on top of the round-trip samples.
    let g = RobotGeometry::default();
    let limits = JointLimits::unbounded();
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..10_000 {
        let q0 = rng.gen_range(0.0..PI);
        let t = FootTarget::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        if let Ok(a) = leg_ik(t, q0, &g, &limits) {
            stats.calls += 1;
            if a.q2 > 0.0 {
                stats.violations += 1;
            }
        }
    }
    ensure(
        stats.violations == 0,
        format!("{} violations", stats.violations),
    )?;
    Ok(format!(
        "{} successful IK calls, 0 with q2 > 0",
        stats.calls
    ))
}

fn c3_tilt() -> Outcome {
    let oracle = |th: f64, ps: f64| {
        ((ps.cos() * th.sin()).powi(2) + ps.sin().powi(2))
            .sqrt()
            .acos()
    };
    let mut worst: f64 = 0.0;
    for l0 in [0.05, 0.1, 0.37, 2.0] {
        let g = RobotGeometry {
            l0,
            ..RobotGeometry::default()
        };
        let at = |th, ps| tilt_angle(TiltInput::new(th, ps), &g).unwrap();
        ensure((at(0.0, 0.0) - FRAC_PI_2).abs() <= 1e-12, "q0(0,0) != π/2")?;
        ensure(at(FRAC_PI_2, 0.0).abs() <= 1e-12, "q0(π/2,0) != 0")?;
        for (th, ps) in [(0.3, 0.2), (1.1, -0.4), (0.05, 1.4), (FRAC_PI_2, FRAC_PI_2)] {
            let v = at(th, ps);
            for (a, b) in [(-th, ps), (th, -ps), (-th, -ps)] {
                worst = worst.max((at(a, b) - v).abs());
            }
            worst = worst.max((v - oracle(th, ps)).abs());
        }
    }
    ensure(worst <= 1e-12, format!("deviation {worst:.2e}"))?;
    Ok(format!(
        "anchors exact, L0-independent and symmetric (worst {worst:.1e})"
    ))
}

fn c4_gait_speeds() -> Outcome {
    let c = ctx();
    let start = Instant::now();
    let scoot = build_scoot(&StrokeParams::scoot_default(), Direction::Forward, &c)
        .map_err(|e| e.to_string())?;
    let shuffle = build_shuffle(&StrokeParams::shuffle_default(), Direction::Forward, &c)
        .map_err(|e| e.to_string())?;
    let skate =
        build_skate(&SkateParams::default(), Direction::Forward, &c).map_err(|e| e.to_string())?;
    let base = CoastModel {
        decay_rate: 1.0,
        push_gain: 1.0,
        ..CoastModel::default()
    };
    let targets = CalibrationTargets::default();
    let model = calibrate(&scoot, &skate, &base, &targets).map_err(|e| e.to_string())?;
    let speed = |g| gait_speed(g, &model, targets.strides).map_err(|e| e.to_string());
    let (v_scoot, v_shuffle, v_skate) = (speed(&scoot)?, speed(&shuffle)?, speed(&skate)?);
    let elapsed = start.elapsed().as_secs_f64();
    ensure(
        v_scoot < v_shuffle && v_shuffle < v_skate,
        format!("ordering {v_scoot} {v_shuffle} {v_skate}"),
    )?;
    for (mode, v) in [
        ("scooting", v_scoot),
        ("shuffling", v_shuffle),
        ("skating", v_skate),
    ] {
        let r = own_speed_for(mode).unwrap().speed_mps;
        ensure(
            (v - r).abs() <= 0.5 * r,
            format!("{mode} {v:.3} m/s vs {r}"),
        )?;
    }
    let bl = c.geometry.body_length;
    ensure((bl - 0.225).abs() < 1e-12, "body_length default")?;
    for row in MAX_SPEEDS.iter().filter(|r| r.own) {
        let blps = row.speed_blps.unwrap();
        let ratio = row.speed_mps / bl;
        ensure(
            (ratio - blps).abs() <= 0.05 * blps,
            format!("{:?}: {ratio:.3} BL/s vs {blps}", row.mode),
        )?;
    }
    ensure(elapsed < 10.0, format!("took {elapsed:.2} s"))?;
    Ok(format!(
        "k={:.4} G={:.4}: scoot {v_scoot:.3}, shuffle {v_shuffle:.3}, skate {v_skate:.3} m/s ({:.2}/{:.2}/{:.2} BL/s), {elapsed:.2} s",
        model.decay_rate,
        model.push_gain,
        v_scoot / bl,
        v_shuffle / bl,
        v_skate / bl
    ))
}

fn c5_turning_radii() -> Outcome {
    let c = ctx();
    let geom = c.geometry;
    let coast = CoastModel::default();
    let mass = MassModel::default();
    let p = PivotManeuver {
        anchor_distance: 0.153,
        ..PivotManeuver::default()
    };
    let init = BodyState {
        speed: 0.3,
        heading: p.anchor_leg.azimuth(&geom) - FRAC_PI_2,
        ..BodyState::default()
    };
    let tr = simulate_pivot(&init, &p, &coast, &c, &mass).map_err(|e| e.to_string())?;
    let r = turning_radius(&tr).ok_or("pivot has no turn")?;
    ensure((r - 0.153).abs() <= 1e-3, format!("pivot radius {r}"))?;

    // Instantaneous heading change between two straight skates.
    let opts = |strides, initial| SimOptions {
        strides,
        initial,
        ..SimOptions::default()
    };
    let a =
        build_skate(&SkateParams::default(), Direction::Forward, &c).map_err(|e| e.to_string())?;
    let b = build_skate(
        &SkateParams {
            active_leg: LegId::B,
            ..SkateParams::default()
        },
        Direction::Forward,
        &c,
    )
    .map_err(|e| e.to_string())?;
    let first = simulate(&a, &coast, &opts(4, BodyState::default())).map_err(|e| e.to_string())?;
    let before = first.last_state().unwrap();
    let mut turned = change_heading(&before, LegId::A, LegId::B, &geom);
    turned.speed = 0.0;
    turned.heading = leading_heading(turned.orientation, LegId::B, &geom);
    let second = simulate(&b, &coast, &opts(4, turned)).map_err(|e| e.to_string())?;
    let mut path = first.clone();
    path.append(&second);
    let r0 = turning_radius(&path).ok_or("no turn detected")?;
    ensure(r0 == 0.0, format!("heading-change radius {r0}"))?;
    let d_orient = path
        .samples
        .iter()
        .map(|s| wrap_angle(s.body.orientation - init_orientation(&path)).abs())
        .fold(0.0, f64::max);
    ensure(
        d_orient < 1e-9,
        format!("orientation moved by {d_orient:.2e}"),
    )?;
    Ok(format!(
        "pivot {r:.5} m, heading change 0 m, orientation delta {d_orient:.1e}"
    ))
}

fn init_orientation(t: &Trajectory) -> f64 {
    t.samples[0].body.orientation
}

fn c6_stability() -> Outcome {
    let c = ctx();
    let mass = MassModel::default();
    let mut gaits: Vec<(String, GaitSchedule)> = Vec::new();
    for dir in [Direction::Forward, Direction::Backward] {
        let tag = format!("{dir:?}").to_lowercase();
        let e = |e: Error| e.to_string();
        gaits.push((
            format!("scoot-{tag}"),
            build_scoot(&StrokeParams::scoot_default(), dir, &c).map_err(e)?,
        ));
        gaits.push((
            format!("shuffle-{tag}"),
            build_shuffle(&StrokeParams::shuffle_default(), dir, &c).map_err(e)?,
        ));
        gaits.push((
            format!("skate-{tag}"),
            build_skate(&SkateParams::default(), dir, &c).map_err(e)?,
        ));
    }
    gaits.push((
        "stand".into(),
        maneuver_stand(&c).map_err(|e| e.to_string())?,
    ));
    gaits.push((
        "brake".into(),
        maneuver_brake(&c).map_err(|e| e.to_string())?,
    ));
    gaits.push((
        "pivot".into(),
        maneuver_pivot(&PivotManeuver::default(), &c).map_err(|e| e.to_string())?,
    ));
    let mut min = f64::INFINITY;
    for (name, g) in &gaits {
        let s = check_schedule_stability(g, &mass).map_err(|e| e.to_string())?;
        ensure(
            s.min_margin > 0.0,
            format!("{name} margin {}", s.min_margin),
        )?;
        min = min.min(s.min_margin);
    }
    let over = build_shuffle(
        &StrokeParams {
            stroke_center: 0.02,
            stroke_length: 0.08,
            ..StrokeParams::shuffle_default()
        },
        Direction::Forward,
        &c,
    )
    .map_err(|e| e.to_string())?;
    let adv = check_schedule_stability(&over, &mass).map_err(|e| e.to_string())?;
    ensure(!adv.stable(), "over-stroked shuffle passed")?;

    let mut rng = StdRng::seed_from_u64(6);
    let mut disagree = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(3..=5);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let hull = convex_hull(&pts);
        let p = Vec2::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        let d = hull.signed_distance(p);
        let inside = hull.vertices.len() >= 3 && ray_cast_inside(p, &hull.vertices);
        if (d > 0.0) != inside {
            disagree += 1;
        }
    }
    ensure(disagree == 0, format!("{disagree} sign disagreements"))?;
    Ok(format!(
        "{} schedules stable (min margin {min:.4} m), over-stroke margin {:.4} m, 10000 polygon cases agree",
        gaits.len(),
        adv.min_margin
    ))
}

fn c7_stairs() -> Outcome {
    let c = ctx();
    let geom = c.geometry;
    let diameter = operating_diameter(&geom);
    let ok = stair_feasible(
        &StairSpec {
            rise: 0.1,
            tread_depth: diameter,
        },
        &geom,
    );
    ensure(ok.feasible, format!("rejected: {:?}", ok.reasons))?;
    let too_high = stair_feasible(
        &StairSpec {
            rise: 0.5 * geom.hip_height + 1e-6,
            tread_depth: 0.3,
        },
        &geom,
    );
    ensure(
        !too_high.feasible,
        "accepted a rise above half the hip height",
    )?;
    let shallow = stair_feasible(
        &StairSpec {
            rise: 0.1,
            tread_depth: diameter - 1e-3,
        },
        &geom,
    );
    ensure(
        !shallow.feasible,
        "accepted a tread shallower than the operating circle",
    )?;

    let stair = StairSpec {
        rise: 0.1,
        tread_depth: 0.3,
    };
    let mass = MassModel::default();
    let seq = build_stair_sequence(&stair, &c, &StairSettings::default(), &mass)
        .map_err(|e| e.to_string())?;
    let run = execute_stair_sequence(&seq, &c, &mass).map_err(|e| e.to_string())?;
    ensure(run.steps.len() == 7, format!("{} steps", run.steps.len()))?;
    let f = run
        .steps
        .iter()
        .find(|s| s.label == StepLabel::Stair(StairPanel::F))
        .ok_or("no step F")?;
    ensure(
        f.support == SupportMode::SpherePlusCage,
        format!("step F support {:?}", f.support),
    )?;
    ensure(
        (run.com_rise - stair.rise).abs() <= 1e-3,
        format!("CoM rise {}", run.com_rise),
    )?;
    Ok(format!(
        "7 steps, F on sphere+cage, CoM rise {:.6} m",
        run.com_rise
    ))
}

fn c8_cord() -> Outcome {
    let c = ctx();
    let skate = SkateParams::default();
    let shuffle = StrokeParams::shuffle_default();
    let lift = skate.lift_height;
    let mut worst_gap = f64::INFINITY;
    for h in [0.0, 0.01, 0.02, lift - 1e-3] {
        let seq = build_cord_sequence(h, &c, &skate, &shuffle, 2).map_err(|e| e.to_string())?;
        ensure(
            seq.heading_changes() == 2,
            format!("{} heading changes", seq.heading_changes()),
        )?;
        for step in &seq.steps {
            let StepAction::Gait { schedule: g, .. } = &step.action else {
                continue;
            };
            let r = c.geometry.sphere_radius;
            let a = g.active_leg();
            let starts = g.phase_starts();
            // Every tick of every phase in which the part crossing the cord
            // is off the ground.
            for (i, p) in g.phases().iter().enumerate() {
                let n = (p.duration / c.settings.tick).ceil() as usize;
                for k in 0..=n {
                    let s = g.sample(starts[i] + p.duration * k as f64 / n as f64);
                    let clearance = if g.kind() == GaitKind::Shuffle {
                        // Sphere bottom above the ground the stance feet define.
                        let ground = g.phases()[0].legs[a.index()].target.y;
                        -ground - r
                    } else if p.kind == PhaseKind::Return {
                        let q = g.joint_angles_of(&s).map_err(|e| e.to_string())?[a.index()];
                        oracle_fk(q.q0, q.q1, q.q2, &c.geometry).y + r
                    } else {
                        continue;
                    };
                    ensure(
                        clearance > h,
                        format!("{}: clearance {clearance:.4} at cord {h}", step.label),
                    )?;
                    worst_gap = worst_gap.min(clearance - h);
                }
            }
        }
        execute_cord_sequence(&seq, &CoastModel::default(), &MassModel::default())
            .map_err(|e| e.to_string())?;
    }
    ensure(
        matches!(
            build_cord_sequence(lift, &c, &skate, &shuffle, 2),
            Err(Error::CordTooHigh { .. })
        ),
        "cord at lift height accepted",
    )?;
    Ok(format!(
        "2 heading changes, smallest clearance surplus {worst_gap:.4} m"
    ))
}

fn c9_determinism() -> Outcome {
    let run = |dir: &std::path::Path| {
        let code = tripod_core::cli::run([
            "tripod",
            "simulate",
            "skate",
            "--strides",
            "5",
            "--out",
            dir.to_str().unwrap(),
        ]);
        ensure(code == 0, format!("exit code {code}"))
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(a.path())?;
    run(b.path())?;
    for f in ["trajectory.csv", "servo_schedule.csv", "metrics.txt"] {
        let x = std::fs::read(a.path().join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(f)).map_err(|e| e.to_string())?;
        ensure(x == y, format!("{f} differs between runs"))?;
    }

    let c = ctx();
    let cal = ServoCalibration::default();
    let half_deg = 0.5f64.to_radians();
    let mut worst_joint: f64 = 0.0;
    let mut worst_pos: f64 = 0.0;
    let gaits = [
        build_scoot(&StrokeParams::scoot_default(), Direction::Forward, &c),
        build_shuffle(&StrokeParams::shuffle_default(), Direction::Backward, &c),
        build_skate(&SkateParams::default(), Direction::Forward, &c),
        maneuver_stand(&c),
        maneuver_pivot(&PivotManeuver::default(), &c),
    ];
    for g in gaits {
        let g = g.map_err(|e| e.to_string())?;
        let rows =
            import_servo_schedule(&export_servo_schedule(&g, &cal).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
        let inst = rows_to_joint_angles(&rows, &cal).map_err(|e| e.to_string())?;
        ensure(inst.len() == g.tick_times().len(), "instant count")?;
        for ((_, legs), t) in inst.iter().zip(g.tick_times()) {
            let want = g.joint_angles(t).map_err(|e| e.to_string())?;
            let s = g.sample(t);
            for i in 0..3 {
                let (q1, q2) = legs[i];
                worst_joint = worst_joint
                    .max((q1 - want[i].q1).abs())
                    .max((q2 - want[i].q2).abs());
                let f = oracle_fk(want[i].q0, q1, q2, &c.geometry);
                let target = s.legs[i].target;
                worst_pos = worst_pos.max((f - Vector2::new(target.x, target.y)).norm());
            }
        }
    }
    // Position bound implied by a 0.5° error on each joint.
    let pos_tol = (c.geometry.l1 + 2.0 * c.geometry.l2) * half_deg;
    ensure(
        worst_joint <= half_deg,
        format!("joint error {:.3}°", worst_joint.to_degrees()),
    )?;
    ensure(
        worst_pos <= pos_tol,
        format!("foot error {worst_pos:.2e} m"),
    )?;
    Ok(format!(
        "CSVs byte-identical; round trip joint error {:.3}°, foot error {:.2e} m",
        worst_joint.to_degrees(),
        worst_pos
    ))
}

fn main() {
    let mut ik = IkStats::default();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 IK/FK round trip", c1_ik_fk_round_trip(&mut ik)),
        ("2 elbow-up", c2_elbow_up(&mut ik)),
        ("3 tilt properties", c3_tilt()),
        ("4 gait speeds", c4_gait_speeds()),
        ("5 turning radii", c5_turning_radii()),
        ("6 stability suite", c6_stability()),
        ("7 stair sequence", c7_stairs()),
        ("8 cord sequence", c8_cord()),
        ("9 determinism and export", c9_determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
