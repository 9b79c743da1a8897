use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"
[system]
na = 2
nc = 1
subsystems = [[0.5, -0.2, 1.0], [-0.4, 0.1, 2.5]]

[noise]
kind = "truncated-gaussian"
std = 1e-3
bound = 3e-3

[switching]
kind = "min-dwell"
dwell = 10
geo_p = 0.2

[experiment]
realizations = 2
horizon = 60
base_seed = 5

[output]
trace = true
"#;

const THEORY: &str = r#"
[system]
na = 2
nc = 1
subsystems = [[0.7, -0.12, 1.0]]

[identifier]
window_r = 10
window_c = 100

[theory]
sigma_n = 1e-4
steps = 20
eps0_sq = 3.0
phi_max = 6.0
s_min = 20.0
psi = 0.5
n_max = 3e-4
"#;

fn sarx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = sarx(args);
    assert!(
        out.status.success(),
        "sarx {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Compares `produced` against the stored golden file, rewriting it when
/// `SARX_BLESS` is set.
fn check_golden(produced: &Path, name: &str) {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let bytes = fs::read(produced).unwrap();
    if std::env::var_os("SARX_BLESS").is_some() {
        fs::write(&golden, &bytes).unwrap();
    }
    let stored = fs::read(&golden).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert!(stored == bytes, "{name} differs from its golden file");
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_matches_golden_and_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["simulate", s(&cfg), "--output", s(&a)]);
    run_ok(&["simulate", s(&cfg), "--output", s(&b)]);
    let text = fs::read_to_string(a.join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 61);
    assert_eq!(text, fs::read_to_string(b.join("trajectory.csv")).unwrap());
    check_golden(&a.join("trajectory.csv"), "trajectory.csv");
}

#[test]
fn seed_flag_changes_the_data() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["simulate", s(&cfg), "--output", s(&a)]);
    run_ok(&["simulate", s(&cfg), "--output", s(&b), "--seed", "6"]);
    assert_ne!(
        fs::read(a.join("trajectory.csv")).unwrap(),
        fs::read(b.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn identify_matches_golden() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let out = dir.path().join("id");
    run_ok(&["identify", s(&cfg), "--output", s(&out)]);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["fe"].is_number() && summary["cer"].is_number());
    assert_eq!(summary["baseline"], false);
    check_golden(&out.join("records.csv"), "records.csv");
    check_golden(&out.join("summary.json"), "summary.json");
    check_golden(&out.join("bound_trace.csv"), "bound_trace.csv");
}

#[test]
fn identify_reads_a_simulated_trajectory() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let (sim, direct, replay) = (
        dir.path().join("sim"),
        dir.path().join("d"),
        dir.path().join("r"),
    );
    run_ok(&["simulate", s(&cfg), "--output", s(&sim)]);
    run_ok(&["identify", s(&cfg), "--output", s(&direct)]);
    let traj = sim.join("trajectory.csv");
    run_ok(&[
        "identify",
        s(&cfg),
        "--output",
        s(&replay),
        "--trajectory",
        s(&traj),
    ]);
    assert_eq!(
        fs::read(direct.join("records.csv")).unwrap(),
        fs::read(replay.join("records.csv")).unwrap()
    );
}

#[test]
fn disabled_bounds_flag_the_baseline() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &format!("{SMALL}\n[identifier]\nbound_mode = {{ kind = \"disabled\" }}\n"),
    );
    let out = dir.path().join("id");
    run_ok(&["identify", s(&cfg), "--output", s(&out)]);
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"baseline\": true"));
    assert!(!out.join("bound_trace.csv").exists());
}

#[test]
fn oversized_exact_window_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &format!("{SMALL}\n[identifier]\nwindow_c = 30\n"));
    let out = sarx(&["identify", s(&cfg), "--output", s(&dir.path().join("id"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monte-carlo"));
}

#[test]
fn missing_system_section_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[input]\nstd = 1.0\n");
    let out = sarx(&["simulate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &SMALL.replace("dwell = 10", "dwel = 10"));
    let out = sarx(&["simulate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dwel"));
}

#[test]
fn unstable_simulation_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &SMALL
            .replace("[0.5, -0.2, 1.0]", "[3.0, 0.0, 1.0]")
            .replace("horizon = 60", "horizon = 2000"),
    );
    let out = sarx(&["simulate", s(&cfg), "--output", s(&dir.path().join("sim"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    let out = sarx(&["simulate", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_single_cell_matches_golden() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["experiment", s(&cfg), "--output", s(&a)]);
    run_ok(&["experiment", s(&cfg), "--output", s(&b), "--threads", "2"]);
    let csv = fs::read_to_string(a.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv, fs::read_to_string(b.join("summary.csv")).unwrap());
    check_golden(&a.join("summary.csv"), "experiment.csv");
}

#[test]
fn experiment_grid_has_one_row_per_cell() {
    let dir = TempDir::new().unwrap();
    let grid = r#"
[system]
na = 2
nc = 1
poles = { m = 2, c1 = 1.0 }

[experiment]
realizations = 2
horizon = 80
patterns = [
    { kind = "slow", block_length = 20 },
    { kind = "min-dwell", dwell = 10, geo_p = 0.2 },
    { kind = "fast" },
]
noise_levels = [1e-1, 1e-2, 1e-3]
"#;
    let cfg = write_config(&dir, grid);
    let out = dir.path().join("grid");
    run_ok(&["experiment", s(&cfg), "--output", s(&out)]);
    let csv = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(out.join("realizations.json").exists());
}

#[test]
fn theory_matches_golden() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, THEORY);
    let out = dir.path().join("th");
    run_ok(&["theory", s(&cfg), "--output", s(&out)]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("theory.json")).unwrap()).unwrap();
    assert!((report["lambda_min"].as_f64().unwrap() - 0.63).abs() < 0.01);
    assert!((report["lambda_max"].as_f64().unwrap() - 2.71).abs() < 0.01);
    assert!(report["local"]["radius"]["value"].is_number());
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 21);
    check_golden(&out.join("theory.json"), "theory.json");
    check_golden(&out.join("curve.csv"), "curve.csv");
}

#[test]
fn noiseless_theory_curve_is_geometric() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &THEORY
            .replace("sigma_n = 1e-4", "sigma_n = 0.0")
            .replace("s_min = 20.0\n", ""),
    );
    let out = dir.path().join("th");
    run_ok(&["theory", s(&cfg), "--output", s(&out)]);
    let upper: Vec<f64> = fs::read_to_string(out.join("curve.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    let ratio = upper[1] / upper[0];
    assert!(ratio < 1.0);
    for w in upper.windows(2) {
        assert!((w[1] / w[0] - ratio).abs() < 1e-12);
    }
}

#[test]
fn theory_without_section_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let out = sarx(&["theory", s(&cfg), "--output", s(&dir.path().join("th"))]);
    assert_eq!(out.status.code(), Some(2));
}
