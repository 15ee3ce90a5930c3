//! Command-line behaviour: exit codes, output formats, determinism and reports.

use std::path::Path;
use std::process::Command;

use isothermic::cli::run;
use serde_json::Value;
use tempfile::tempdir;

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("isothermic").chain(args.iter().copied()))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn monodromy_at_three_eighths_has_eigenvalues_plus_and_minus_one() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(run_args(&["monodromy", "--lambda", "0.375", "--model", "revolution-sech", "--out", out.to_str().unwrap()]), 0);
    let v = read_json(&out);
    assert_eq!(v["seed"], 0);
    let mut re: Vec<f64> = v["report"]["eigenvalues"].as_array().unwrap().iter().map(|z| z["re"].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    let expected = [-1.0, -1.0, 1.0, 1.0, 1.0];
    for (a, b) in re.iter().zip(expected) {
        assert!((a - b).abs() < 1e-8, "{re:?}");
    }
}

#[test]
fn darboux_with_random_init_converges_to_the_base_point() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("d.obj");
    assert_eq!(run_args(&["darboux", "--lambda", "0.375", "--init", "random", "--seed", "11", "--grid", "4,5,6.283185307179586", "--out", out.to_str().unwrap()]), 0);
    let obj = std::fs::read_to_string(&out).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 20);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 3 * 4);
    let report = read_json(&out.with_extension("json"));
    assert_eq!(report["seed"], 11);
    assert_eq!(report["report"]["limit"]["endpoint"], "converged-to-point");
    assert!(report["report"]["distance_to_f_s"].as_f64().unwrap() < 1e-6);
}

#[test]
fn omega_check_rejects_a_rotated_differential() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("o.json");
    assert_eq!(run_args(&["omega-check", "--model", "revolution-rotated", "--out", out.to_str().unwrap()]), 2);
    let v = read_json(&out);
    assert_eq!(v["report"]["passed"], false);
    assert!(v["report"]["max_closedness"].as_f64().unwrap() > 1e-3);
    assert_eq!(run_args(&["omega-check", "--model", "revolution-sech", "--out", out.to_str().unwrap()]), 0);
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(run_args(&["calapso", "--bogus", "1"]), 2);
    assert_eq!(run_args(&["no-such-command"]), 2);
    assert_eq!(run_args(&["darboux", "--model", "{\"model\":"]), 2);
    assert_eq!(run_args(&["darboux", "--lambda", "0"]), 2);
    assert_eq!(run_args(&["surface", "--tol=-1"]), 2);
    assert_eq!(run_args(&["surface", "--rmin", "2"]), 2);
}

#[test]
fn unreachable_tolerance_exits_with_three() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(run_args(&["monodromy", "--tol", "1e-30", "--out", out.to_str().unwrap()]), 3);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert_eq!(run_args(&["limits", "--lambda", "0.625", "--seed", "5", "--schedule", "12", "--out", p.to_str().unwrap()]), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let header = std::fs::read_to_string(&a).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "radius,calapso_increment,darboux_increment,darboux_distance_to_f_s,error_estimate");
    let c = dir.path().join("c.json");
    let d = dir.path().join("d.json");
    for p in [&c, &d] {
        assert_eq!(run_args(&["pushforward", "--kind", "darboux", "--j", "2", "--seed", "3", "--out", p.to_str().unwrap()]), 0);
    }
    assert_eq!(std::fs::read(&c).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn reported_error_estimates_honor_the_tolerance() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("l.json");
    for tol in ["1e-8", "1e-11"] {
        assert_eq!(run_args(&["limits", "--tol", tol, "--schedule", "10", "--format", "json", "--out", out.to_str().unwrap()]), 0);
        let v = read_json(&out);
        let t: f64 = tol.parse().unwrap();
        assert_eq!(v["tol"].as_f64().unwrap(), t);
        for row in v["report"]["table"]["rows"].as_array().unwrap() {
            assert!(row[4].as_f64().unwrap() <= t);
        }
    }
}

#[test]
fn empty_grid_gives_an_empty_mesh() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.obj");
    assert_eq!(run_args(&["surface", "--grid", "0,0,1", "--out", out.to_str().unwrap()]), 0);
    let obj = std::fs::read_to_string(&out).unwrap();
    assert!(obj.lines().all(|l| l.starts_with('#')));
}

#[test]
fn config_file_and_inline_descriptor_are_accepted() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("model.json");
    std::fs::write(&cfg, r#"{"model":"sphere","Q":{"c1":[1,0]},"r0":1.0}"#).unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(run_args(&["monodromy", "--lambda", "0.5", "--model", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    assert_eq!(read_json(&out)["report"]["parabolic"], true);
    let inline = r#"{"model":"sphere","Q":{"hol":[[0,0],[1,0]]},"r0":1.0}"#;
    assert_eq!(run_args(&["zero-smoke", "--lambda", "0.7", "--model", inline, "--out", out.to_str().unwrap()]), 0);
    assert!(read_json(&out)["report"]["darboux_spread"].as_f64().unwrap() < 1e-6);
}

#[test]
fn binary_maps_exit_codes_and_honors_the_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_isothermic");
    let ok = Command::new(bin).args(["surface", "--grid", "2,2,1", "--format", "csv"]).env("MPL_THREADS", "1").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let bad = Command::new(bin).args(["omega-check", "--model", "revolution-rotated"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
