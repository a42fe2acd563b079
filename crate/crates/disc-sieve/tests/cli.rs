use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disc-sieve")).args(args).env_remove("DISC_SIEVE_BUDGET").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn localdensity_example() {
    let v = json(&["localdensity", "--n", "3", "--p", "3", "--oracle"]);
    assert_eq!(v["formula"], "22/27");
    assert_eq!(v["oracle"], "22/27");
    assert_eq!(v["equal"], true);
    let rho = json(&["localdensity", "--n", "2", "--p", "5", "--kind", "rho"]);
    assert_eq!(rho["formula"], "24/25");
    assert!(rho.get("oracle").is_none_or(Value::is_null));
}

#[test]
fn embed_and_qinv_agree() {
    let v = json(&["embed", "--poly", "x^3+x^2+5x+25", "--m", "5"]);
    assert_eq!(v["absQ"], "5");
    assert_eq!(v["d"], 2);
    assert_eq!(v["S"], serde_json::json!([[0, 10, 0], [10, -2, -1], [0, -1, -2]]));
    let m = serde_json::json!({"n": 3, "d": v["d"], "S": v["S"]}).to_string();
    let q = json(&["qinv", "--matrix", &m]);
    assert_eq!(q["absQ"], "5");
    assert_eq!(q["invariant_poly"], v["invariant_poly"]);
}

#[test]
fn classify_weak_example() {
    let v = json(&["classify", "--poly", "x^3+x^2+5x+25", "--p", "5", "--oracle"]);
    assert_eq!(v["tag"], "WEAK");
    assert_eq!(v["oracle_strong"], false);
    let sq = json(&["classify", "--poly", "x^2+1", "--p", "3"]);
    assert_eq!(sq["discriminant"], "-4");
}

#[test]
fn reduce_square_root_of_two() {
    let v = json(&["reduce", "--poly", "x^2-2"]);
    let g = v["gram"].as_array().unwrap();
    let close = |x: &Value, want: f64| (x.as_f64().unwrap() - want).abs() < 1e-9;
    assert!(close(&g[0][0], 2.0) && close(&g[0][1], 0.0) && close(&g[1][1], 4.0));
    assert_eq!(v["strongly_quasi_reduced"], "true");
    let cert = json(&["reduce", "--poly", "x^2-2", "--tie", "0"]);
    assert_eq!(cert["tie_tolerance"], 0.0);
}

#[test]
fn density_csv_and_timing() {
    let out = run(&["density", "--n", "2", "--X", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("experiment,n,X,total"));
    assert!(lines.next().unwrap().starts_with("squarefree,2,5,"));
    let timed = json(&["density", "--n", "2", "--X", "5"]);
    assert!(timed["wall_time"].is_number());
    let bare = json(&["density", "--n", "2", "--X", "5", "--no-timing"]);
    assert!(bare.get("wall_time").is_none());
}

#[test]
fn threads_flag_keeps_output() {
    let args = |t: &'static str| ["--threads", t, "--no-timing", "tail", "--n", "3", "--X", "4", "--M", "1,2,5"];
    let a = run(&args("1"));
    let b = run(&args("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("disc-sieve-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["--out", p, "sieve-check", "--n", "2", "--X", "3", "--no-timing"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["equal"], true);
}

#[test]
fn bad_input_exit_codes() {
    let bad_poly = run(&["classify", "--poly", "2x^2+1", "--p", "3"]);
    assert_eq!(bad_poly.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_poly.stderr).starts_with("error:"));
    assert_eq!(run(&["qinv", "--matrix", "{not json"]).status.code(), Some(2));
    assert_eq!(run(&["reduce", "--poly", "x^2", "--tie", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["c3vol", "--samples", "10"]).status.code(), Some(2));
    assert_ne!(run(&["nosuch"]).status.code(), Some(0));
}

#[test]
fn budget_overrun_exit_code() {
    let out = Command::new(env!("CARGO_BIN_EXE_disc-sieve"))
        .args(["density", "--n", "3", "--X", "10"])
        .env("DISC_SIEVE_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
