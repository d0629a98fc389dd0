use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use qgraph::fixtures;
use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().unwrap()
}

fn write_graph(dir: &Path, name: &str, g: &qgraph::MetricGraph) -> String {
    let path = dir.join(name);
    std::fs::write(&path, g.to_spec().to_json()).unwrap();
    path.display().to_string()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn missing_graph_exits_with_error() {
    let out = qgraph(&["spectrum", "--graph", "/nonexistent/g.json", "--count", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn malformed_graph_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"vertices\": 2}").unwrap();
    let out = qgraph(&["check", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn target_is_required_and_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "i.json", &fixtures::interval(1.0));
    assert_ne!(qgraph(&["spectrum", "--graph", &g]).status.code(), Some(0));
    let both = qgraph(&["spectrum", "--graph", &g, "--count", "2", "--lambda-max", "10"]);
    assert_ne!(both.status.code(), Some(0));
    let bad_tol = qgraph(&["spectrum", "--graph", &g, "--count", "2", "--tol", "-1"]);
    assert_ne!(bad_tol.status.code(), Some(0));
}

#[test]
fn interval_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "i.json", &fixtures::interval(1.0));
    let out = qgraph(&["spectrum", "--graph", &g, "--count", "6", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,lambda\n"));
    let values = csv_column(&text, 1);
    assert_eq!(values.len(), 6);
    for (n, v) in values.iter().enumerate() {
        assert!((v - (n as f64 * PI).powi(2)).abs() < 1e-8, "{n}: {v}");
    }
}

#[test]
fn both_methods_agree_and_json_parses() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "s.json", &fixtures::star3(-1.0));
    let out = qgraph(&["spectrum", "--graph", &g, "--lambda-max", "30", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,secular,fem,difference\n"));
    for d in csv_column(&text, 3) {
        assert!(d.abs() < 1e-3);
    }

    let report = dir.path().join("s_spec.json");
    let out = qgraph(&[
        "spectrum", "--graph", &g, "--count", "4", "--method", "both", "--format", "json",
        "--output", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["certified"], true);
    assert_eq!(doc["fem"]["values"].as_array().unwrap().len(), 4);
    let lambda0 = doc["secular"]["values"][0].as_f64().unwrap();
    assert!(lambda0 < -0.3 && lambda0 > -0.4);
}

#[test]
fn fem_only_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "i.json", &fixtures::interval(1.0));
    let out = qgraph(&["spectrum", "--graph", &g, "--count", "3", "--method", "fem", "--mesh-size", "1e-2"]);
    assert_eq!(out.status.code(), Some(0));
    let values = csv_column(&String::from_utf8(out.stdout).unwrap(), 1);
    assert!((values[1] - PI * PI).abs() < 1e-2);
}

#[test]
fn trace_avg_writes_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "s.json", &fixtures::star3(-1.0));
    let plot = dir.path().join("plot.dat");
    let out = qgraph(&["trace-avg", "--graph", &g, "--count", "30", "--plot", plot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,lambda_pert,lambda_free,diff,S_N,cesaro\n"));
    assert_eq!(text.lines().count(), 31);
    let data = std::fs::read_to_string(&plot).unwrap();
    assert!(data.starts_with("# N S_N\n"));
    assert_eq!(data.lines().count(), 31);

    let short = qgraph(&["trace-avg", "--graph", &g, "--count", "5"]);
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn check_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cx = write_graph(dir.path(), "r.json", &fixtures::counterexample());
    let out = qgraph(&["check", "--graph", &cx]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["phi1"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["phi2"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);

    let star = write_graph(dir.path(), "s.json", &fixtures::star3(-1.0));
    let verdict = dir.path().join("v.json");
    let out = qgraph(&["check", "--graph", &star, "--output", verdict.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("SpectrumMustDiffer"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&verdict).unwrap()).unwrap();
    assert_eq!(v["conclusion"], "SpectrumMustDiffer");
}

#[test]
fn demos_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (name, file, marker) in [
        ("counterexample", "counterexample.json", "within 1e-6: yes"),
        ("star3", "star3.json", "is below the free ground state"),
        ("interval", "interval.json", "abs error"),
    ] {
        let out = qgraph(&["demo", name, "--dir", d]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(String::from_utf8_lossy(&out.stdout).contains(marker), "{name}");
        assert!(dir.path().join(file).is_file());
    }
}

#[test]
fn random_graph_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..3 {
        let g = fixtures::random_graph(&mut || rng.gen::<f64>());
        let path = write_graph(dir.path(), &format!("g{i}.json"), &g);
        let out = qgraph(&["spectrum", "--graph", &path, "--count", "5", "--tol", "1e-10"]);
        assert_eq!(out.status.code(), Some(0));
        let cli = csv_column(&String::from_utf8(out.stdout).unwrap(), 1);
        let lib = qgraph::secular::compute_spectrum(
            &g,
            &qgraph::secular::SpectrumRequest::count(5).with_tol(1e-10),
        )
        .unwrap()
        .expanded();
        for (a, b) in cli.iter().zip(&lib) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
