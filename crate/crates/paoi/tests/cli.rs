use std::path::Path;
use std::process::{Command, Output};

use paoi::dataset::{load_dataset, read_theta};
use paoi::report::{load_report, report_to_string};

fn paoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paoi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bound_prints_one_row() {
    let o = paoi(&[
        "bound",
        "--method",
        "robust2",
        "--lambda",
        "0.5",
        "--mu",
        "1",
        "--alpha",
        "2",
        "--gamma-a",
        "1",
        "--gamma-s",
        "1",
        "--n",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "robust2,0.5,1,2,1,1,100,2.41421356237,4.41421356237\n"
    );

    let o = paoi(&[
        "bound", "--method", "kingman", "--lambda", "0.5", "--mu", "1", "--var-a", "4", "--var-s",
        "1",
    ]);
    assert_eq!(stdout(&o), "kingman,0.5,1,,,,,3.5,5.5\n");
}

#[test]
fn bound_validation_errors_exit_1() {
    let unstable = paoi(&[
        "bound",
        "--method",
        "robust1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--gamma-a",
        "1",
        "--gamma-s",
        "1",
    ]);
    assert_eq!(unstable.status.code(), Some(1));
    let missing = paoi(&[
        "bound", "--method", "kingman", "--lambda", "0.5", "--mu", "1",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    let unknown = paoi(&["bound", "--method", "nope", "--lambda", "0.5", "--mu", "1"]);
    assert_eq!(unknown.status.code(), Some(1));
    let bad_alpha = paoi(&[
        "bound",
        "--method",
        "robust2",
        "--lambda",
        "0.5",
        "--mu",
        "1",
        "--alpha",
        "2.5",
        "--gamma-a",
        "1",
        "--gamma-s",
        "1",
    ]);
    assert_eq!(bad_alpha.status.code(), Some(1));
    assert_eq!(paoi(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_mm1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sim.json",
        r#"{"arrival": {"kind": "exponential", "rate": 0.5},
            "service": {"kind": "exponential", "rate": 1}, "n": 20000, "replications": 10}"#,
    );
    let o = paoi(&["simulate", "--config", &cfg, "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("scenario"), "single_source");
    assert_eq!(col("replications"), "10");
    let paoi_mean: f64 = col("mean_paoi").parse().unwrap();
    assert!((paoi_mean - 4.0).abs() < 0.15, "{paoi_mean}");
    assert_eq!(col("unstable"), "false");
    // same seed, same output
    assert_eq!(
        stdout(&paoi(&["simulate", "--config", &cfg, "--seed", "3"])),
        text
    );
}

#[test]
fn sweep_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        r#"{"scenario": "two_source", "lambdas": [0.1, 0.3], "n": 3000, "replications": 3}"#,
    );
    let out = dir.path().join("r.csv");
    let o = paoi(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 + 1 + 1);
    assert_eq!(report_to_string(&load_report(&out).unwrap()), text);

    let o = paoi(&["report", "--in", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("robust3"));

    let other = dir.path().join("s.csv");
    paoi(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        other.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_ne!(std::fs::read_to_string(other).unwrap(), text);
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let gated = write(
        dir.path(),
        "g.json",
        r#"{"scenario": "two_source", "methods": ["kingman"]}"#,
    );
    let out = dir.path().join("x.csv");
    let o = paoi(&["sweep", "--config", &gated, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    let malformed = write(dir.path(), "m.json", "{");
    assert_eq!(
        paoi(&["sweep", "--config", &malformed, "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        paoi(&["sweep", "--config", "/nonexistent.json", "--out", "x"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        paoi(&["report", "--in", "/nonexistent.csv"]).status.code(),
        Some(3)
    );

    let heavy = write(
        dir.path(),
        "h.json",
        r#"{"scenario": "single_source", "lambdas": [0.5], "n": 1000, "replications": 2,
            "interarrival": {"kind": "pareto", "shape": 1.5}}"#,
    );
    let o = paoi(&["sweep", "--config", &heavy, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.exists());
}

#[test]
fn sweep_uses_theta_file_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "theta.json",
        r#"{"scenario": "single_source", "theta0": -0.376, "theta1": 3.978, "theta2": 0.5, "provenance": "copy"}"#,
    );
    let with_file = write(
        dir.path(),
        "a.json",
        r#"{"scenario": "single_source", "lambdas": [0.5], "n": 2000, "replications": 2, "theta": {"file": "theta.json"}}"#,
    );
    let builtin = write(
        dir.path(),
        "b.json",
        r#"{"scenario": "single_source", "lambdas": [0.5], "n": 2000, "replications": 2}"#,
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(
        paoi(&[
            "sweep",
            "--config",
            &with_file,
            "--out",
            a.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        paoi(&["sweep", "--config", &builtin, "--out", b.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());

    let wrong = write(
        dir.path(),
        "c.json",
        r#"{"scenario": "two_source", "lambdas": [0.2], "theta": {"file": "theta.json"}}"#,
    );
    assert_eq!(
        paoi(&["sweep", "--config", &wrong, "--out", "x"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn calibrate_writes_theta_and_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"lambdas": [0.6, 0.8],
            "interarrival_families": [{"kind": "exponential"}, {"kind": "uniform_mean"}],
            "service_families": [{"kind": "exponential"}, {"kind": "uniform_mean"}],
            "n": 5000, "replications": 4, "seed": 2}"#,
    );
    let theta = dir.path().join("theta.json");
    let data = dir.path().join("data.csv");
    let o = paoi(&[
        "calibrate",
        "--scenario",
        "single_source",
        "--grid",
        &grid,
        "--out",
        theta.to_str().unwrap(),
        "--dataset",
        data.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc = read_theta(&theta).unwrap();
    assert!(doc.provenance.contains("8 of 8 grid points"));
    assert!(doc.coefficients.theta1 > 0.0);
    let dataset = load_dataset(&data).unwrap();
    assert_eq!(dataset.len(), 8);
    assert!(stdout(&o).starts_with("single_source,"));

    // exponential-only grid: every regressor is constant
    let singular = write(
        dir.path(),
        "s.json",
        r#"{"lambdas": [0.3, 0.6, 0.9], "interarrival_families": [{"kind": "exponential"}],
            "service_families": [{"kind": "exponential"}], "n": 2000, "replications": 2}"#,
    );
    let o = paoi(&[
        "calibrate",
        "--scenario",
        "single",
        "--grid",
        &singular,
        "--out",
        theta.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
