//! End-to-end tests of the `knalg` binary: outputs, exit codes and
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn knalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knalg"))
        .args(args)
        .env_remove("KNALG_JOBS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classical_basis_is_witt() {
    let out = knalg(&["basis", "--lambda", "-1", "--window", "-2:2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let els = doc["elements"].as_array().unwrap();
    assert_eq!(els.len(), 5);
    for (el, n) in els.iter().zip(-2i64..) {
        assert_eq!(el["degree"], n.to_string());
        assert_eq!(el["exponents"], serde_json::json!([n + 1]));
        assert_eq!(el["constant"], "1");
    }
    assert_eq!(doc["local_coordinates"], "z_p = z - P_p");
}

#[test]
fn two_point_basis_is_factored() {
    let dir = TempDir::new().unwrap();
    let geom = write(dir.path(), "g.json", r#"{"in_points": ["0", "1"]}"#);
    let out = knalg(&["basis", "--geometry", &geom, "--lambda", "0", "--window", "-1:1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    for el in doc["elements"].as_array().unwrap() {
        let fac = el["factored"].as_str().unwrap();
        let a: knalg::ratfunc::RationalFunction = fac.parse().unwrap();
        let b: knalg::ratfunc::RationalFunction = el["form"].as_str().unwrap().parse().unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let out = knalg(&["basis", "--geometry", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed geometry JSON"), "{}", stderr(&out));
    assert_eq!(knalg(&["basis", "--window", "3:1"]).status.code(), Some(2));
    assert_eq!(knalg(&["basis", "--lambda", "1/3"]).status.code(), Some(2));
    assert_eq!(knalg(&["cocycle", "--kind", "psi9"]).status.code(), Some(2));
    assert_eq!(knalg(&["cocycle", "--kind", "psi2", "--algebra", "e8"]).status.code(), Some(2));
    assert_eq!(knalg(&["nonsense"]).status.code(), Some(2));
    assert_eq!(knalg(&["basis", "--cycle", "1,1"]).status.code(), Some(2));
}

#[test]
fn virasoro_cocycle_table() {
    let out = knalg(&["cocycle", "--kind", "psi3", "--window", "-10:10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let values = doc["values"].as_array().unwrap();
    // n = 0, ±1 vanish; the other 18 degrees pair with their negatives.
    assert_eq!(values.len(), 18);
    for v in values {
        assert_eq!(v["degree_sum"], "0");
        let x = v["x"].as_str().unwrap();
        let n: i64 = x[2..x.find(',').unwrap()].parse().unwrap();
        assert_eq!(v["value"], (n * n * n - n).to_string());
    }
    assert_eq!(doc["support"], serde_json::json!({"m1": 0, "m2": 0}));
}

#[test]
fn virasoro_extension_terms() {
    let out = knalg(&["extend", "--kind", "psi3", "--rescale", "virasoro", "--window", "-3:3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"e(2,1)\",\"e(-2,1)\",0,-1/2"), "{text}");
}

#[test]
fn narrow_structconsts_window_warns() {
    let dir = TempDir::new().unwrap();
    let geom = write(dir.path(), "g.json", r#"{"in_points": ["0", "1"]}"#);
    let out = knalg(&["structconsts", "--geometry", &geom, "--window", "0:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("grading bounds may be truncated"));
    let wide = knalg(&["structconsts", "--geometry", &geom, "--window", "-2:2"]);
    assert!(!stderr(&wide).contains("warning"));
    let doc = json(&wide);
    assert_eq!(doc["grading_bounds"]["lower_shift"], 0);
    assert_eq!(doc["leading_term_mismatches"], 0);
}

#[test]
fn pairing_is_dual() {
    let out = knalg(&["pairing", "--lambda", "1/2", "--window", "-2:2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["dual"], true);
    assert!(doc["nonzero"].as_array().unwrap().iter().all(|r| r["n"] == r["m"] && r["value"] == "1"));
}

#[test]
fn fock_central_scalars() {
    let out = knalg(&["fock", "--lambda", "2", "--window", "-1:1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["c_lambda"], "-26");
    let central = doc["central"].as_array().unwrap();
    assert!(!central.is_empty());
    for row in central {
        assert_eq!(row["reduced"], row["closed_form"]);
    }
    assert_eq!(doc["columns"].as_array().unwrap().len(), 8);
}

#[test]
fn lax_membership_exit_codes() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.json", r#"{"type": "gl2", "points": [{"gamma": "3", "alpha": ["1", "0"]}]}"#);
    let good = write(dir.path(), "good.json", r#"{"entries": [["2", "5 + 1/(z-3)"], ["0", "7"]]}"#);
    let bad = write(dir.path(), "bad.json", r#"{"entries": [["2", "5 + 1/(z-3)"], ["1", "7"]]}"#);
    let out = knalg(&["lax", "check", "--tyurin", &t, "--element", &good]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["valid"], true);
    let out = knalg(&["lax", "check", "--tyurin", &t, "--element", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["violations"][0]["constraint"], "L_{s,0}α = κα");
    let so3 = write(dir.path(), "so3.json", r#"{"type": "so3", "points": [{"gamma": "3", "alpha": ["1", "0", "0"]}]}"#);
    assert_eq!(knalg(&["lax", "check", "--tyurin", &so3, "--element", &good]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut all: Vec<&str> = args.to_vec();
        all.extend(["--out", path.to_str().unwrap()]);
        let out = knalg(&all);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let args = ["lax", "close-check", "--type", "sp4", "--pairs", "2", "--seed", "9"];
    assert_eq!(run("a.json", &args), run("b.json", &args));
    let args = ["structconsts", "--lambda", "0", "--op", "product", "--format", "csv"];
    assert_eq!(run("c.csv", &args), run("d.csv", &args));
    let with_jobs = Command::new(env!("CARGO_BIN_EXE_knalg"))
        .args(["structconsts", "--lambda", "0", "--op", "product", "--format", "csv"])
        .env("KNALG_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(with_jobs.stdout, run("e.csv", &args));
}

#[test]
fn verify_classical_passes() {
    let out = knalg(&["verify", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 8);
    assert!(stderr(&out).contains("seed: 3"));
}
