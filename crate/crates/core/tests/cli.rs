use std::path::Path;
use std::process::{Command, Output};

fn tripod(args: &[&str], env_config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tripod"));
    cmd.args(args).env_remove("TRIPOD_CONFIG");
    if let Some(p) = env_config {
        cmd.env("TRIPOD_CONFIG", p);
    }
    cmd.output().expect("binary runs")
}

fn metrics(dir: &Path) -> Vec<(String, String)> {
    std::fs::read_to_string(dir.join("metrics.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn metric(dir: &Path, key: &str) -> String {
    metrics(dir)
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("{key} missing"))
        .1
}

#[test]
fn skate_writes_all_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripod(
        &[
            "simulate",
            "skate",
            "--strides",
            "10",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in ["trajectory.csv", "metrics.txt", "servo_schedule.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let speed: f64 = metric(dir.path(), "speed_mps").parse().unwrap();
    let blps: f64 = metric(dir.path(), "speed_blps").parse().unwrap();
    assert!((blps - speed / 0.225).abs() < 1e-5);
}

#[test]
fn pivot_reports_anchor_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripod(
        &[
            "simulate",
            "pivot",
            "--anchor-distance",
            "0.153",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: f64 = metric(dir.path(), "turning_radius_m").parse().unwrap();
    assert!((r - 0.153).abs() < 1e-3, "{r}");
}

#[test]
fn steep_stair_exits_two_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripod(
        &[
            "simulate",
            "stairs",
            "--rise",
            "0.25",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("50% of the hip height"), "{err}");
    assert!(!dir.path().join("metrics.txt").exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tripod(&["simulate", "tumble"], None).status.code(), Some(1));
    assert_eq!(
        tripod(&["simulate", "skate", "--strides", "many"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tripod(&[], None).status.code(), Some(1));
}

#[test]
fn bad_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[geometry]\nsphere_radius = -1.0\n").unwrap();
    let out = tripod(
        &[
            "simulate",
            "skate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sphere_radius"));
}

#[test]
fn config_is_read_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.toml");
    std::fs::write(&cfg, "config_version = 1\n[coast]\npush_gain = 0.5\n").unwrap();
    let default_dir = dir.path().join("default");
    let env_dir = dir.path().join("env");
    assert!(tripod(
        &["simulate", "scoot", "--out", default_dir.to_str().unwrap()],
        None
    )
    .status
    .success());
    assert!(tripod(
        &["simulate", "scoot", "--out", env_dir.to_str().unwrap()],
        Some(&cfg)
    )
    .status
    .success());
    let a: f64 = metric(&default_dir, "speed_mps").parse().unwrap();
    let b: f64 = metric(&env_dir, "speed_mps").parse().unwrap();
    assert!(b < a, "{b} !< {a}");
}

#[test]
fn unstable_gait_exits_two_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("over.toml");
    std::fs::write(
        &cfg,
        "[gait.shuffle]\nstroke_center = 0.02\nstroke_length = 0.08\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = tripod(
        &["simulate", "shuffle", "--out", out_dir.to_str().unwrap()],
        Some(&cfg),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unstable"));
    let forced = tripod(
        &[
            "simulate",
            "shuffle",
            "--allow-unstable",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        Some(&cfg),
    );
    assert!(
        forced.status.success(),
        "{}",
        String::from_utf8_lossy(&forced.stderr)
    );
    let margin: f64 = metric(&out_dir, "min_margin_m").parse().unwrap();
    assert!(margin < 0.0);
}

#[test]
fn sequences_carry_step_markers() {
    let dir = tempfile::tempdir().unwrap();
    let stairs = dir.path().join("stairs");
    assert!(tripod(
        &["simulate", "stairs", "--out", stairs.to_str().unwrap()],
        None
    )
    .status
    .success());
    let servo = std::fs::read_to_string(stairs.join("servo_schedule.csv")).unwrap();
    for p in ["A", "B", "C", "D", "E", "F", "G"] {
        assert!(servo.contains(&format!("#step,{p}\n")), "{p}");
    }
    assert_eq!(metric(&stairs, "step_F_support"), "sphere_cage");

    let cord = dir.path().join("cord");
    assert!(tripod(
        &[
            "simulate",
            "cord",
            "--cord-height",
            "0.02",
            "--out",
            cord.to_str().unwrap()
        ],
        None
    )
    .status
    .success());
    assert_eq!(metric(&cord, "heading_changes"), "2");
}

#[test]
fn config_command_prints_round_trippable_toml() {
    let out = tripod(&["config"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = tripod_core::config::RobotConfig::from_toml(&text).unwrap();
    assert_eq!(cfg, tripod_core::config::RobotConfig::default());
}
