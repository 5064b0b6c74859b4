use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arealength"))
        .args(args)
        .env_remove("RATIO_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn h0_json() {
    let out = run(&["h0", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["h0"].as_f64().unwrap() - 4.034_159_790_535_631).abs() < 1e-10);
    assert!(v["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn h_table_csv_has_header_and_ends() {
    let out = run(&["h-table", "--n", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,zeta0,zeta1,h");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0.0,"));
    assert!(lines[5].starts_with("1.0,"));
}

#[test]
fn extremal_rows() {
    let out = run(&["extremal", "--m", "1,2,117"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[2]["ratio"].as_f64().unwrap() > 4.0);
    assert!(rows[0]["ratio"].as_f64().unwrap() < rows[1]["ratio"].as_f64().unwrap());
}

#[test]
fn verify_builtin_holds() {
    let out = run(&["verify", "--map", "shift3", "--which", "main"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let r = &v[0];
    assert_eq!(r["bound_name"], "h0*L");
    assert_eq!(r["holds"], true);
    assert!(r["slack"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_spec_file() {
    let dir = std::env::temp_dir().join(format!("arealength-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("map.json");
    std::fs::write(&path, r#"{"kind":"polynomial","coeffs":[3.0,0.5]}"#).unwrap();
    let out = run(&["verify", "--spec-file", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("map_label,A,L,bound_name"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn omitted_value_violation_exits_one() {
    let out = run(&["verify", "--map", "identity"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--tol", "-1", "h0"]).status.code(), Some(2));
    assert_eq!(run(&["h0", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["h-table", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["extremal", "--m", "0"]).status.code(), Some(2));
    assert_eq!(run(&["rado", "--count", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--map", "no_such_map"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn tol_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_arealength"))
        .arg("h0")
        .env("RATIO_TOL", "-3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rado_small_run() {
    let out = run(&["rado", "--count", "20", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_positive"], true);
    assert!(v["max_length"].as_f64().unwrap() < std::f64::consts::TAU - 0.01);
    let again = json(&run(&["rado", "--count", "20", "--seed", "7"]));
    assert_eq!(v, again);
}

#[test]
fn classify_polygon_file() {
    let dir = std::env::temp_dir().join(format!("arealength-classify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poly.json");
    std::fs::write(
        &path,
        r#"{"vertices":[{"re":0.5,"im":0.5},{"re":-0.5,"im":0.5},{"re":0.0,"im":-0.5}],"closed":true}"#,
    )
    .unwrap();
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["vertices"][0]["convexity"], "strictly_convex");
    std::fs::remove_dir_all(&dir).ok();
}
