use std::process::Command;

use serde_json::Value;

fn hcusp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hcusp")).args(args).env_remove("HC_PRECISION_BITS").output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = hcusp(args);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    v["result"].clone()
}

#[test]
fn mu_at_i_for_infinity() {
    let r = json(&["mu", "--field", "builtin:Q", "--tau", "0+1i", "--cusp", "1:0"]);
    assert_eq!(r["mu"].as_f64().unwrap(), 1.0);
}

#[test]
fn hermite_over_rationals() {
    let r = json(&["hermite", "--field", "builtin:Q"]);
    let d = r["distance"].as_f64().unwrap();
    assert!((d - (2.0 / 3f64.sqrt()).sqrt()).abs() < 1e-3);
}

#[test]
fn volume_over_rationals() {
    let r = json(&["volume", "--field", "builtin:Q", "--prime-bound", "1e6"]);
    assert!((r["vol_gamma"].as_f64().unwrap() - std::f64::consts::PI / 3.0).abs() < 1e-6);
}

#[test]
fn field_info_lists_basis() {
    let r = json(&["field-info", "--field", "quadratic:5"]);
    assert_eq!(r["discriminant"], "5");
    assert_eq!(r["basis_labels"][1], "w");
}

#[test]
fn closest_and_reduce_in_quadratic_field() {
    let r = json(&["closest", "--field", "quadratic:2", "--tau", "0.3+0.7i,-0.2+1.1i"]);
    assert!(r["mu1"].as_f64().unwrap() >= r["mu2"].as_f64().unwrap());
    let r = json(&["reduce", "--field", "quadratic:2", "--tau", "3.3+0.1i,-2.2+0.05i"]);
    assert_eq!(r["reduced"].as_array().unwrap().len(), 2);
}

#[test]
fn mc_output_is_byte_identical_across_runs_and_workers() {
    let a = hcusp(&["integral", "--t", "0.5", "--samples", "5000", "--seed", "3", "--workers", "1"]);
    let b = hcusp(&["integral", "--t", "0.5", "--samples", "5000", "--seed", "3", "--workers", "1"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let c = hcusp(&["g", "--x", "1.2", "--samples", "5000", "--seed", "3", "--workers", "3"]);
    let d = hcusp(&["g", "--x", "1.2", "--samples", "5000", "--seed", "3", "--workers", "3"]);
    assert_eq!(c.1, d.1);
}

#[test]
fn verify_minkowski_random_points() {
    let r = json(&["verify-minkowski", "--field", "quadratic:5", "--random", "200"]);
    assert_eq!(r["violations"], 0);
}

#[test]
fn selftest_passes() {
    let r = json(&["selftest", "--field", "quadratic:2", "--cases", "30"]);
    assert_eq!(r["passed"], true);
}

#[test]
fn malformed_literals_exit_one() {
    assert_eq!(hcusp(&["mu", "--tau", "0+1", "--cusp", "1:0"]).0, 1);
    assert_eq!(hcusp(&["mu", "--tau", "0+1i", "--cusp", "1/0"]).0, 1);
    assert_eq!(hcusp(&["mu", "--field", "quadratic:5", "--tau", "0+1i", "--cusp", "1:0"]).0, 1);
    assert_eq!(hcusp(&["mu", "--tau", "0+1i", "--cusp", "1:z"]).0, 1);
    assert_eq!(hcusp(&["volume", "--field", "quadratic:4"]).0, 1);
    assert_eq!(hcusp(&["no-such-command"]).0, 1);
}

#[test]
fn text_and_csv_formats() {
    let (code, out, _) = hcusp(&["zeta2", "--prime-bound", "1000", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("command,field,schema,"));
    let (_, out, _) = hcusp(&["zeta2", "--prime-bound", "1000", "--format", "text"]);
    assert!(out.contains("value: "));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hcusp"))
        .args(["field-info"])
        .env("HC_PRECISION_BITS", "128")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["precision_bits"], 128);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("hcusp-out-{}.json", std::process::id()));
    let (code, stdout, _) = hcusp(&["field-info", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "field-info");
    std::fs::remove_file(path).unwrap();
}
