use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn polebridge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polebridge"))
        .args(args)
        .env_remove("POLEBRIDGE_JOBS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Report text with every `wall_time` value blanked.
fn without_wall_time(text: &str) -> String {
    text.split(", ")
        .map(|field| {
            if field.starts_with("\"wall_time\"") {
                "\"wall_time\": _"
            } else {
                field
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

const FLAT_IBP: &str = r#"{
  "geometry": {"kind": "euclidean", "dim": 2},
  "simulation": {"steps": 200, "paths": 2000, "seed": 1},
  "experiment": {"check": "ibp"}
}"#;

#[test]
fn identities_on_hyperbolic_space_pass_and_write_residuals() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "hyp3.json",
        r#"{"geometry": {"kind": "hyperbolic", "dim": 3, "c": 1.0},
            "experiment": {"check": "identities", "points": 10}}"#,
    );
    let out = dir.path().join("out");
    let o = polebridge(&["identities", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("identities.csv")).unwrap();
    assert!(csv.starts_with("geometry,check,tau,r,value,reference,rel_err,tol,passed\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("identities.json")).unwrap()).unwrap();
    assert!(json.as_array().unwrap().iter().any(|r| r["check"] == "pde_identity_fd"));
}

#[test]
fn flat_ibp_passes_with_seed_override() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "flat.json", FLAT_IBP);
    let o = polebridge(&["ibp", "--config", &cfg, "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert!(v["z"].as_f64().unwrap().abs() < 3.0);
    assert!((v["lhs"].as_f64().unwrap() - 0.450158).abs() < 1e-6);
    assert!(stderr(&o).contains("\"status\": \"pass\""));
}

#[test]
fn reruns_are_byte_identical_apart_from_wall_time() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "flat.json", FLAT_IBP);
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "1"] {
        let o = polebridge(&["ibp", "--config", &cfg, "--paths", "500", "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(without_wall_time(&String::from_utf8(o.stdout).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn zero_jobs_from_environment_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "flat.json", FLAT_IBP);
    let o = Command::new(env!("CARGO_BIN_EXE_polebridge"))
        .args(["ibp", "--config", &cfg, "--paths", "50"])
        .env("POLEBRIDGE_JOBS", "0")
        .output()
        .unwrap();
    // zero workers is rejected by the argument parser
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_dimension_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"geometry": {"dim": 0}, "experiment": {"check": "ibp"}}"#);
    let o = polebridge(&["ibp", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension must be ≥ 1"));
}

#[test]
fn unknown_functional_lists_the_registry() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"geometry": {"dim": 2}, "experiment": {"functionals": ["area(0.5)"]}}"#,
    );
    let o = polebridge(&["ibp", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("area(0.5)"));
    for key in ["coord(k,axis,t)", "dist2(t)", "bump(t[,width])", "prod(F,G)"] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let o = polebridge(&["radial", "--config", "/nonexistent/polebridge.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threshold_failure_exits_with_one() {
    // times listed backwards: m(t) grows along the list, so "decreasing" fails
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "decay.json",
        r#"{"geometry": {"dim": 2},
            "simulation": {"steps": 300, "eps_end": 1e-4, "paths": 400},
            "experiment": {"check": "decay", "directions": ["sine(1,1)"], "t": [0.999, 0.9]}}"#,
    );
    let o = polebridge(&["decay", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("\"status\": \"fail\""));
}

#[test]
fn simulate_dumps_paths() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("paths.csv");
    let cfg = write(
        dir.path(),
        "sim.json",
        &format!(
            r#"{{"geometry": {{"kind": "hyperbolic", "dim": 2}},
                "simulation": {{"steps": 20, "paths": 3}},
                "experiment": {{"check": "simulate", "frames": true}},
                "output": {{"path_dump": "{}"}}}}"#,
            dump.display()
        ),
    );
    let o = polebridge(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&dump).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,t,x_1,x_2,r,u_11,u_21,u_12,u_22"));
    assert_eq!(lines.count(), 3 * 21);
}
