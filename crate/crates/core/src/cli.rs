//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage, parse or I/O errors, 2 when the
//! request is infeasible or unstable.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{load_config, resolve_config_path, RobotConfig};
use crate::error::{Error, Result};
use crate::export::{
    export_cord_servo, export_pose_servo, export_servo_schedule, export_stair_servo,
    trajectory_csv, Metrics,
};
use crate::gait::{
    build_scoot, build_shuffle, build_skate, maneuver_brake, maneuver_stand, ContactMode,
    Direction, GaitSchedule, PivotManeuver,
};
use crate::reference;
use crate::sequences::{
    build_cord_sequence, build_stair_sequence, execute_cord_sequence, execute_stair_sequence,
    StairSpec,
};
use crate::sim::{
    average_velocity, incline_roll, simulate, simulate_pivot, turning_radius, BodyState,
    InclineRun, SimOptions, Trajectory, TrajectorySample,
};
use crate::stability::{classify_support, stability_margin, Vec2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tripod", version, about = "Tripod sphere robot gait simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a gait, maneuver or sequence and write trajectory.csv,
    /// metrics.txt and servo_schedule.csv.
    Simulate(SimulateArgs),
    /// Print the effective configuration as TOML.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Scoot,
    Shuffle,
    Skate,
    Stand,
    Brake,
    Pivot,
    Incline,
    Stairs,
    Cord,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    target: Target,
    #[arg(long, default_value_t = 10)]
    strides: usize,
    /// TOML config; falls back to $TRIPOD_CONFIG, then built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run gaits in reverse.
    #[arg(long)]
    backward: bool,
    /// Stair rise (m).
    #[arg(long, default_value_t = 0.1)]
    rise: f64,
    /// Stair tread depth (m).
    #[arg(long, default_value_t = 0.3)]
    tread: f64,
    /// Pivot anchor distance (m); overrides the config.
    #[arg(long)]
    anchor_distance: Option<f64>,
    /// Speed entering a pivot (m/s).
    #[arg(long, default_value_t = 0.3)]
    entry_speed: f64,
    /// Cord height (m).
    #[arg(long, default_value_t = 0.01)]
    cord_height: f64,
    /// Incline angle (rad).
    #[arg(long, default_value_t = 0.1)]
    incline: f64,
    /// Downhill direction in the world frame (rad).
    #[arg(long, default_value_t = 0.0)]
    downhill_azimuth: f64,
    /// Hold the incline with frictional feet instead of rolling.
    #[arg(long)]
    braked: bool,
    /// Duration of incline runs (s).
    #[arg(long, default_value_t = 2.0)]
    duration: f64,
    /// Simulate schedules that fail the stability check.
    #[arg(long)]
    allow_unstable: bool,
}

/// Files produced by one `simulate` run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub trajectory_csv: String,
    pub metrics: Metrics,
    pub servo_csv: String,
}

impl Outputs {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trajectory.csv"), &self.trajectory_csv)?;
        std::fs::write(dir.join("metrics.txt"), self.metrics.render())?;
        std::fs::write(dir.join("servo_schedule.csv"), &self.servo_csv)?;
        Ok(())
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                EXIT_INFEASIBLE
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn load(explicit: Option<&Path>) -> Result<RobotConfig> {
    match resolve_config_path(explicit) {
        Some(p) => load_config(&p),
        None => Ok(RobotConfig::default()),
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Config { config } => {
            print!("{}", load(config.as_deref())?.to_toml());
            Ok(())
        }
        Command::Simulate(args) => {
            let cfg = load(args.config.as_deref())?;
            let out = simulate_target(&cfg, &args)?;
            out.write_to(&args.out)
        }
    }
}

fn direction(backward: bool) -> Direction {
    if backward {
        Direction::Backward
    } else {
        Direction::Forward
    }
}

fn gait_for(cfg: &RobotConfig, target: Target, dir: Direction) -> Result<GaitSchedule> {
    let ctx = cfg.context();
    match target {
        Target::Scoot => build_scoot(&cfg.gait.scoot, dir, &ctx),
        Target::Shuffle => build_shuffle(&cfg.gait.shuffle, dir, &ctx),
        Target::Skate => build_skate(&cfg.gait.skate, dir, &ctx),
        Target::Stand => maneuver_stand(&ctx),
        Target::Brake => maneuver_brake(&ctx),
        _ => unreachable!("not a periodic gait"),
    }
}

fn reference_mode(target: Target) -> Option<&'static str> {
    match target {
        Target::Scoot => Some("scooting"),
        Target::Shuffle => Some("shuffling"),
        Target::Skate => Some("skating"),
        _ => None,
    }
}

fn common_metrics(m: &mut Metrics, name: &str, traj: &Trajectory, cfg: &RobotConfig) -> Result<()> {
    m.text("target", name)
        .num("duration_s", traj.duration())
        .num("min_margin_m", traj.min_margin());
    if traj.duration() > 0.0 {
        let v = average_velocity(traj, &cfg.geometry)?;
        m.num("speed_mps", v.mps).num("speed_blps", v.blps);
    }
    Ok(())
}

fn simulate_target(cfg: &RobotConfig, args: &SimulateArgs) -> Result<Outputs> {
    let ctx = cfg.context();
    let name = args
        .target
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let mut m = Metrics::new();
    let opts = SimOptions {
        strides: args.strides,
        initial: BodyState::default(),
        mass: cfg.mass,
        allow_unstable: args.allow_unstable,
    };
    match args.target {
        Target::Scoot | Target::Shuffle | Target::Skate | Target::Stand | Target::Brake => {
            if args.strides == 0 {
                return Err(Error::InvalidParameter(
                    "--strides must be at least 1".into(),
                ));
            }
            let g = gait_for(cfg, args.target, direction(args.backward))?;
            let traj = simulate(&g, &cfg.coast, &opts)?;
            common_metrics(&mut m, &name, &traj, cfg)?;
            m.text("strides", args.strides.to_string())
                .num("period_s", g.period());
            if let Some(r) = reference_mode(args.target).and_then(reference::own_speed_for) {
                m.num("reference_speed_mps", r.speed_mps);
                if let Some(bl) = r.speed_blps {
                    m.num("reference_speed_blps", bl);
                }
            }
            Ok(Outputs {
                trajectory_csv: trajectory_csv(&traj),
                metrics: m,
                servo_csv: export_servo_schedule(&g, &cfg.servo)?,
            })
        }
        Target::Pivot => {
            let p = PivotManeuver {
                anchor_distance: args
                    .anchor_distance
                    .unwrap_or(cfg.gait.pivot.anchor_distance),
                ..cfg.gait.pivot
            };
            // Enter moving perpendicular to the anchor leg.
            let heading = p.anchor_leg.azimuth(&cfg.geometry) - std::f64::consts::FRAC_PI_2;
            let init = BodyState {
                speed: args.entry_speed,
                heading,
                ..BodyState::default()
            };
            let traj = simulate_pivot(&init, &p, &cfg.coast, &ctx, &cfg.mass)?;
            common_metrics(&mut m, &name, &traj, cfg)?;
            m.num("anchor_distance_m", p.anchor_distance);
            radius_metrics(&mut m, &traj, "pivot");
            let g = crate::gait::maneuver_pivot(&p, &ctx)?;
            Ok(Outputs {
                trajectory_csv: trajectory_csv(&traj),
                metrics: m,
                servo_csv: export_servo_schedule(&g, &cfg.servo)?,
            })
        }
        Target::Incline => {
            let uphill = args.downhill_azimuth + std::f64::consts::PI;
            let stance = crate::gait::orientation_aware_stand(args.incline, uphill, &ctx)?;
            let run = InclineRun {
                incline: args.incline,
                downhill_azimuth: args.downhill_azimuth,
                duration: args.duration,
                braked: args.braked,
            };
            let traj = incline_roll(&BodyState::default(), &run, &cfg.coast, &ctx)?;
            common_metrics(&mut m, &name, &traj, cfg)?;
            m.num("incline_rad", args.incline)
                .text("braked", args.braked.to_string());
            let mode = if args.braked {
                ContactMode::Frictional
            } else {
                ContactMode::Rolling
            };
            Ok(Outputs {
                trajectory_csv: trajectory_csv(&traj),
                metrics: m,
                servo_csv: export_pose_servo(&stance.angles, &[mode; 3], &cfg.servo)?,
            })
        }
        Target::Stairs => {
            let stair = StairSpec {
                rise: args.rise,
                tread_depth: args.tread,
            };
            let seq = build_stair_sequence(&stair, &ctx, &cfg.stairs, &cfg.mass)?;
            let run = execute_stair_sequence(&seq, &ctx, &cfg.mass)?;
            let mut samples = Vec::with_capacity(run.steps.len() + 1);
            let mut t = 0.0;
            let mut push = |t: f64, pose: &crate::sequences::StairPose| -> Result<()> {
                let contacts = pose.contacts(&ctx.geometry, &cfg.stairs)?;
                let com = pose.com(&ctx, &cfg.mass)?;
                samples.push(TrajectorySample {
                    t,
                    body: BodyState {
                        position: Vec2::new(pose.center_x, 0.0),
                        ..BodyState::default()
                    },
                    support: classify_support(&contacts).mode,
                    margin: stability_margin(com, &contacts).margin,
                    contacts,
                });
                Ok(())
            };
            push(t, &seq.start)?;
            for (step, res) in seq.steps.iter().zip(&run.steps) {
                t += step.duration;
                push(t, &res.end)?;
            }
            let traj = Trajectory {
                samples,
                stride_period: None,
                strides: 0,
            };
            m.text("target", &name)
                .num("rise_m", args.rise)
                .num("tread_m", args.tread)
                .text("steps", run.steps.len().to_string())
                .num("com_rise_m", run.com_rise)
                .num("min_margin_m", traj.min_margin());
            for s in &run.steps {
                m.text(&format!("step_{s}_support", s = s.label), s.support.name());
            }
            Ok(Outputs {
                trajectory_csv: trajectory_csv(&traj),
                metrics: m,
                servo_csv: export_stair_servo(&seq, &ctx, &cfg.servo)?,
            })
        }
        Target::Cord => {
            let seq = build_cord_sequence(
                args.cord_height,
                &ctx,
                &cfg.gait.skate,
                &cfg.gait.shuffle,
                args.strides.max(1),
            )?;
            let run = execute_cord_sequence(&seq, &cfg.coast, &cfg.mass)?;
            m.text("target", &name)
                .num("cord_height_m", args.cord_height)
                .num("duration_s", run.trajectory.duration())
                .num("min_margin_m", run.trajectory.min_margin())
                .text("heading_changes", run.heading_changes.to_string());
            let min_clear = run
                .clearances
                .iter()
                .map(|c| c.1)
                .fold(f64::INFINITY, f64::min);
            m.num("min_clearance_m", min_clear);
            Ok(Outputs {
                trajectory_csv: trajectory_csv(&run.trajectory),
                metrics: m,
                servo_csv: export_cord_servo(&seq, &cfg.servo)?,
            })
        }
    }
}

fn radius_metrics(m: &mut Metrics, traj: &Trajectory, mode: &str) {
    match turning_radius(traj) {
        Some(r) => m.num("turning_radius_m", r),
        None => m.text("turning_radius_m", "none"),
    };
    if let Some(r) = reference::own_radius_for(mode) {
        m.num("reference_turning_radius_m", r.radius_m);
    }
}
