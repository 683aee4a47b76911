use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn ergm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergm")).args(args).output().expect("binary runs")
}

fn model() -> String {
    data("edges_triangles.model").display().to_string()
}

fn nine() -> String {
    data("nine_node_18_13.txt").display().to_string()
}

fn results(out: &Output) -> Value {
    let report: Value = serde_json::from_slice(&out.stdout).expect("json report");
    report["results"].clone()
}

#[test]
fn stats_reports_edges_and_triangles() {
    let out = ergm(&["stats", "--network", &nine(), "--model", &model()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = results(&out).to_string();
    assert!(text.contains("18") && text.contains("13"), "{text}");
}

#[test]
fn mple_csv_has_one_column_per_term() {
    let out = ergm(&["--format", "csv", "mple", "--network", &nine(), "--model", &model()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta_edges,theta_triangles");
    let theta: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((theta[0] + 1.3).abs() < 1e-3 && (theta[1] - 0.702).abs() < 1e-3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ergm(&["stats", "--bogus"]).status.code(), Some(2));
    assert_eq!(ergm(&["exact-mle", "--model", &model(), "--nodes", "12", "--target", "1,1"]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_4() {
    let out = ergm(&["stats", "--network", "/nonexistent/net.txt", "--model", &model()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn separated_mple_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star.txt");
    std::fs::write(&star, "n 5\n0 1\n0 2\n0 3\n0 4\n").unwrap();
    let out = ergm(&["mple", "--network", star.to_str().unwrap(), "--model", &model()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_mle_on_the_hull_boundary_exits_3() {
    let out = ergm(&["exact-mle", "--model", &model(), "--nodes", "5", "--target", "4,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_mle_matches_the_library() {
    let out = ergm(&["exact-mle", "--model", &model(), "--nodes", "6", "--target", "7,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let theta: Vec<f64> = serde_json::from_value(results(&out)["theta"].clone()).unwrap();
    let table = ergm_core::enumerate(&ergm_core::ModelSpec::edges_triangles(), 6, 9).unwrap();
    let fit = table.exact_mle(&[7.0, 2.0]).unwrap();
    assert!(fit.theta.max_abs_diff(&theta) < 1e-9);
}

#[test]
fn simulate_is_reproducible_and_seed_dependent() {
    let run = |seed: &str| {
        let args = ["--seed", seed, "simulate", "--model", &model(), "--nodes", "7", "--theta", "-1,0.2", "--samples", "50"];
        let out = ergm(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        results(&out)
    };
    assert_eq!(run("4"), run("4"));
    assert_ne!(run("4"), run("5"));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.json");
    let out = ergm(&["--output", path.to_str().unwrap(), "stats", "--network", &nine(), "--model", &model()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["command"], "stats");
}
