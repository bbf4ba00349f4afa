use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trianglecf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// CSV body as rows of fields, header dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn classify_reports_case() {
    let v = json(&["classify", "--sides", "1,1.5,2.239"]);
    assert_eq!(v["meta"]["case"], "C");
    assert_eq!(v["triangle"]["case"], "C");
    let area = num(&v["triangle"]["area"]);
    assert!((area - 0.606_805_381_658_681).abs() < 1e-12);
}

#[test]
fn classify_ignores_side_order() {
    let a = stdout(&["classify", "--sides", "1,1.5,2.239"]);
    let b = stdout(&["classify", "--sides", "2.239,1,1.5"]);
    assert_eq!(a, b);
}

#[test]
fn classify_rejects_non_triangles() {
    let out = run(&["classify", "--sides", "1,1,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a triangle"));
    let out = run(&["classify", "--sides", "1,-1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["eval", "--sides", "1,1,1", "--bogus"][..],
        &["eval"][..],
        &["eval", "--sides", "1,1,1", "--r", "0", "--grid", "3"][..],
        &["nonsense"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn eval_at_origin() {
    let rows = csv_rows(&stdout(&["eval", "--sides", "1,1,1", "--r", "0"]));
    assert_eq!(rows.len(), 1);
    let v: Vec<f64> = rows[0].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(v[0], 0.0);
    assert_eq!(v[1], 1.0);
    let slope = -3.0 / (std::f64::consts::PI * 3f64.sqrt() / 4.0);
    assert!((v[2] / slope - 1.0).abs() < 1e-12, "{}", v[2]);
    assert_eq!(v[4], 0.0);
}

#[test]
fn eval_grid_ends_at_zero() {
    let rows = csv_rows(&stdout(&["eval", "--sides", "3,4,5", "--grid", "2"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 5.0);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[1][4], "null");
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let args = ["eval", "--sides", "1,1.06,1.127", "--grid", "17"];
    let csv = stdout(&[&args[..], &["--format", "csv"]].concat());
    let js = stdout(&[&args[..], &["--format", "json"]].concat());
    let v: Value = serde_json::from_str(&js).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let cols = ["r", "gamma", "d1", "d2", "d3"];
    for (line, obj) in csv_rows(&csv).iter().zip(rows) {
        for (field, col) in line.iter().zip(cols) {
            assert_eq!(field, &obj[col].to_string());
        }
    }
    assert_eq!(csv_rows(&csv).len(), rows.len());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let args = ["eval", "--sides", "1,1.5,1.611", "--grid", "9"];
    let printed = stdout(&args);
    let out = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["eval", "--sides", "1,1.5,2.470", "--grid", "33"][..],
        &["check", "--random", "5", "--seed", "3"][..],
        &["formfactor", "--sides", "1,1,1", "--grid", "5"][..],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn check_reference_triangles_pass() {
    let v = json(&["check"]);
    assert_eq!(v["passed"], true);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["pass"] == true));
    let sides: std::collections::BTreeSet<String> =
        rows.iter().map(|r| r["c"].to_string()).collect();
    assert_eq!(sides.len(), 4);
}

#[test]
fn check_single_triangle() {
    let v = json(&["check", "--sides", "1,1,1"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn check_random_batch_passes() {
    let out = run(&["check", "--random", "100", "--seed", "42", "--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn oracle_agrees_at_the_ends() {
    let v = json(&["oracle", "--sides", "3,4,5", "--r", "0", "--format", "json"]);
    assert_eq!(num(&v["rows"][0]["defect"]), 0.0);
    let v = json(&["oracle", "--sides", "1,1.5,2.470", "--r", "2.470", "--format", "json"]);
    assert_eq!(num(&v["rows"][0]["defect"]), 0.0);
}

#[test]
fn oracle_grid_within_tolerance() {
    let v = json(&["oracle", "--sides", "1,1.06,1.127", "--grid", "50", "--format", "json"]);
    assert_eq!(v["passed"], true);
    assert!(num(&v["max_defect"]) <= 1e-7);
    assert_eq!(v["rows"].as_array().unwrap().len(), 50);
}

#[test]
fn form_factor_shape() {
    let rows = csv_rows(&stdout(&["formfactor", "--sides", "1,1.5,1.611", "--grid", "100"]));
    let values: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let (q0, f0) = values[0];
    assert_eq!(q0, 0.0);
    let s = {
        let (a, b, c) = (1.0f64, 1.5f64, 1.611f64);
        let p = (a + b + c) / 2.0;
        (p * (p - a) * (p - b) * (p - c)).sqrt()
    };
    assert!((f0 / s - 1.0).abs() < 1e-9, "{f0} {s}");
    assert!(values[1..].iter().all(|&(_, f)| f < f0));
    let (qmax, last) = *values.last().unwrap();
    assert!((qmax - 50.0 / 1.611).abs() < 1e-12);
    assert!(last.abs() < f0 / 100.0, "{last}");
}
