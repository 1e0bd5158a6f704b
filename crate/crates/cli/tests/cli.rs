use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lrom(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrom")).current_dir(dir).args(args).output().expect("run lrom")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lrom(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1, "summary must be one line: {stdout}");
    stdout
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn synth(dir: &Path, order: &str, extra: &[&str]) {
    let mut args = vec!["synth", "--order", order, "--seed", "5", "-o", "data.csv"];
    args.extend_from_slice(extra);
    ok(dir, &args);
}

#[test]
fn ls_loewner_fit_writes_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "12", &["--grid", "log:0.5:50:200", "--damping", "0.01,0.05"]);
    ok(dir.path(), &["fit", "--method", "ls-loewner", "--order", "12", "--input", "data.csv", "-o", "m.json"]);
    let report = json(dir.path().join("m.report.json"));
    assert_eq!(report["order"], 12);
    assert_eq!(report["method"], "ls-loewner");
    assert!(report["epsilon"].as_f64().unwrap() < 1e-6);
    assert!(dir.path().join("m.json").exists());
}

#[test]
fn lfpp_poles_are_reported_exactly() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "6", &["--grid", "log:0.1:100:80"]);
    ok(
        dir.path(),
        &["fit", "--method", "lfpp", "-i", "data.csv", "--poles", "-1+0.77j,-0.5+3j", "--nodes", "0.5j,2j", "-o", "m.json"],
    );
    ok(dir.path(), &["poles", "m.json", "-o", "p.json"]);
    let mut got: Vec<(f64, f64)> = json(dir.path().join("p.json"))["poles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["re"].as_f64().unwrap(), p["im"].as_f64().unwrap()))
        .collect();
    got.sort_by(|a, b| a.1.total_cmp(&b.1));
    let want = [(-0.5, -3.0), (-1.0, -0.77), (-1.0, 0.77), (-0.5, 3.0)];
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g.0 - w.0).abs() < 1e-10 && (g.1 - w.1).abs() < 1e-10, "{got:?}");
        assert!(g.0 < 0.0);
    }
}

#[test]
fn missing_dataset_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lrom(dir.path(), &["fit", "--method", "aaa", "--input", "nope.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
    assert!(err["message"].as_str().is_some());
}

#[test]
fn bad_arguments_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &[]);
    for args in [
        vec!["fit", "--method", "loewner-svd", "-i", "data.csv", "--order", "4", "--tol", "1e-8"],
        vec!["fit", "--method", "lfpp", "-i", "data.csv", "--poles", "-1+1j"],
        vec!["fit", "--method", "nonsense", "-i", "data.csv"],
        vec!["eval", "--model", "m.json"],
    ] {
        let out = lrom(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(err["error"].is_string());
    }
}

#[test]
fn numerical_failure_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &["--grid", "log:0.1:10:40"]);
    let out = lrom(dir.path(), &["fit", "--method", "lfapp", "-i", "data.csv", "--order", "20"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_recovers_exact_order_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "5", &["--grid", "log:0.1:100:60"]);
    let sweep = ["sweep", "-m", "loewner-svd", "-i", "data.csv", "--orders", "1:1:8"];
    ok(dir.path(), &[&sweep[..], &["-o", "a.csv"]].concat());
    ok(dir.path(), &[&sweep[..], &["-o", "b.csv"]].concat());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    let rows = csv_rows(dir.path().join("a.csv"));
    assert_eq!(rows.len(), 8);
    for row in rows {
        let (r, eps): (usize, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        if r >= 5 {
            assert!(eps <= 1e-8, "r = {r}: {eps}");
        }
    }
}

#[test]
fn mimo_sweep_steps_by_input_count() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "6", &["--inputs", "3", "--outputs", "3", "--grid", "log:0.1:100:30"]);
    ok(dir.path(), &["sweep", "-m", "loewner-svd,ls-loewner", "-i", "data.csv", "--orders", "1:1:12", "-o", "s.csv"]);
    let rows = csv_rows(dir.path().join("s.csv"));
    let orders: Vec<usize> = rows.iter().filter(|r| r[0] == "loewner-svd").map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(orders, vec![3, 6, 9, 12]);
    assert_eq!(rows.len(), 8);
}

#[test]
fn sweep_records_failures_as_nan() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &["--grid", "log:0.1:10:40"]);
    ok(dir.path(), &["sweep", "-m", "lfapp", "-i", "data.csv", "--orders", "4,30", "-o", "s.csv"]);
    let rows = csv_rows(dir.path().join("s.csv"));
    assert!(rows[0][2].parse::<f64>().unwrap().is_finite());
    assert_eq!(rows[1][2], "NaN");
}

#[test]
fn noise_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &[]);
    ok(dir.path(), &["noise", "-i", "data.csv", "--sigma2", "0.15", "--seed", "7", "-o", "n1.csv"]);
    ok(dir.path(), &["noise", "-i", "data.csv", "--sigma2", "0.15", "--seed", "7", "-o", "n2.csv"]);
    let a = std::fs::read(dir.path().join("n1.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("n2.csv")).unwrap());
    assert_ne!(a, std::fs::read(dir.path().join("data.csv")).unwrap());
}

#[test]
fn eval_on_grid_has_one_row_per_frequency() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &[]);
    ok(dir.path(), &["fit", "-m", "loewner-svd", "-i", "data.csv", "--tol", "1e-10", "-o", "m.json"]);
    ok(dir.path(), &["eval", "--model", "m.json", "--grid", "1:0.1:100", "--hz", "-o", "e.csv"]);
    let rows = csv_rows(dir.path().join("e.csv"));
    assert_eq!(rows.len(), 991);
    let w: f64 = rows[0][0].parse().unwrap();
    assert!((w - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn eval_reproduces_report_errors() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "8", &["--grid", "log:0.1:100:50"]);
    for method in ["loewner-svd", "ls-loewner", "aaa", "aaa-sp", "lfapp"] {
        let model = format!("{method}.json");
        ok(dir.path(), &["fit", "-m", method, "-i", "data.csv", "--order", "6", "-o", &model]);
        ok(dir.path(), &["eval", "--model", &model, "-i", "data.csv", "-o", "e.csv"]);
        let report = json(dir.path().join(format!("{method}.report.json")));
        let points = report["points"].as_array().unwrap();
        let rows = csv_rows(dir.path().join("e.csv"));
        assert_eq!(points.len(), rows.len());
        for (p, row) in points.iter().zip(&rows) {
            let abs: f64 = row[row.len() - 2].parse().unwrap();
            let want = p["abs_err"].as_f64().unwrap();
            assert!((abs - want).abs() <= 1e-14 * (1.0 + want), "{method}: {abs} vs {want}");
        }
    }
}

#[test]
fn real_models_by_default_and_complex_on_request() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "4", &["--grid", "log:0.1:10:30"]);
    ok(dir.path(), &["fit", "-m", "ls-loewner", "-i", "data.csv", "--order", "4", "-o", "r.json"]);
    ok(dir.path(), &["fit", "-m", "ls-loewner", "-i", "data.csv", "--order", "4", "--real", "false", "-o", "c.json"]);
    let real = json(dir.path().join("r.json"));
    let a = real.get("A").and_then(Value::as_array).expect("state-space model");
    assert!(a.iter().flat_map(|row| row.as_array().unwrap()).all(|z| z[1].as_f64() == Some(0.0)));
    assert!(json(dir.path().join("c.json")).get("nodes").is_some());
}

#[test]
fn modified_lfapp_uses_peak_list() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["synth", "--order", "4", "--grid", "log:0.1:100:200", "--damping", "0.01,0.02", "--seed", "2", "-o", "d.csv", "--model-output", "t.json"],
    );
    ok(dir.path(), &["poles", "t.json", "-o", "tp.json"]);
    let peaks: Vec<String> = json(dir.path().join("tp.json"))["poles"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["im"].as_f64().unwrap() > 0.0)
        .map(|p| p["im"].as_f64().unwrap().to_string())
        .collect();
    ok(dir.path(), &["fit", "-m", "lfapp", "-i", "d.csv", "--peaks", &peaks.join(","), "-o", "m.json"]);
    let report = json(dir.path().join("m.report.json"));
    assert_eq!(report["order"], 4);
    assert!(report["epsilon"].as_f64().unwrap() < 1e-6);
    assert_eq!(report["poles"]["stable"], true);
}
