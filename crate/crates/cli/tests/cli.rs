use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flagsos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagsos")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn enumerate_counts() {
    let v = json(&flagsos(&["enumerate"]));
    assert_eq!(v["hosts"], 3);
    assert_eq!(v["flags"], 2);
    assert_eq!(json(&flagsos(&["enumerate", "--m", "4"]))["hosts"], 7);
    assert_eq!(json(&flagsos(&["enumerate", "--f", "1"]))["flags"], 1);
}

#[test]
fn table_is_symmetric_and_exact() {
    let v = json(&flagsos(&["table"]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 12);
    let get = |f: u64, fp: u64, h: u64| {
        entries.iter().find(|e| e["F"] == f && e["Fp"] == fp && e["H"] == h).unwrap()["value"].as_str().unwrap().to_string()
    };
    assert_eq!([get(0, 0, 0), get(0, 0, 1), get(0, 0, 2)], ["1", "1/3", "0"]);
    assert_eq!([get(0, 1, 0), get(0, 1, 1), get(0, 1, 2)], ["0", "1/3", "1/3"]);
    assert_eq!([get(1, 1, 0), get(1, 1, 1), get(1, 1, 2)], ["0", "0", "1/3"]);
    for e in entries {
        let (f, fp, h) = (e["F"].as_u64().unwrap(), e["Fp"].as_u64().unwrap(), e["H"].as_u64().unwrap());
        assert_eq!(e["value"].as_str().unwrap(), get(fp, f, h));
    }
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = flagsos(&["solve", "--out", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["bound"], "1/2");
    assert_eq!(c["blocks"][0]["matrix"], serde_json::json!([["1/2", "-1/2"], ["-1/2", "1/2"]]));
    let v = flagsos(&["verify", "certificate", "--certificate", cert.to_str().unwrap()]);
    assert!(v.status.success());
    assert_eq!(json(&v)["passed"], true);
}

#[test]
fn tampered_certificate_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"kind":"flag","bound":"1/2","blocks":[{"label":"T1,f2","matrix":[["1/2","-499/1000"],["-499/1000","1/2"]]}],
        "setup":{"problem":"flag","forbidden":{"n":3,"edges":[[1,2],[1,3],[2,3]]},"host_size":3,"families":[{"type":{"n":1,"edges":[],"labels":[1]},"f":2}]}}"#;
    let p = write(dir.path(), "bad.json", body);
    let out = flagsos(&["verify", "certificate", "--certificate", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["report"]["bound_ok"], false);
}

#[test]
fn trivial_family_gives_two_thirds() {
    let out = flagsos(&["solve", "--f", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["bound"], "2/3");
}

#[test]
fn gp_blocks_and_infeasibility() {
    let v = json(&flagsos(&["gp", "--n", "5"]));
    assert_eq!(v["blocks"][0]["partition"], "(5)");
    assert_eq!(v["blocks"][0]["size"], 2);
    assert_eq!(v["blocks"][1]["partition"], "(4,1)");
    assert_eq!(v["blocks"][1]["size"], 1);
    assert_eq!(v["verification"]["passed"], true);
    assert_eq!(v["worked_example"]["passed"], true);
    let out = flagsos(&["gp", "--n", "5", "--partitions", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gp_degree_zero_bound_is_one() {
    let out = flagsos(&["gp", "--n", "5", "--d", "0", "--mode", "bound"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["bound"], "1");
}

#[test]
fn verify_subcommands_pass() {
    for args in [
        vec!["verify", "identity", "--n", "5"],
        vec!["verify", "mantel", "--n", "5"],
        vec!["verify", "symmetric", "--n", "6"],
    ] {
        let out = flagsos(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn identity_from_files() {
    let dir = tempfile::tempdir().unwrap();
    // x12 x13 x23 vanishes on triangle-free graphs but is not the zero polynomial
    let lhs = write(dir.path(), "l.json", r#"{"n":4,"terms":[{"edges":[[1,2],[1,3],[2,3]],"coeff":"1"}]}"#);
    let rhs = write(dir.path(), "r.json", r#"{"n":4,"terms":[]}"#);
    let ok = flagsos(&["verify", "identity", "--lhs", &lhs, "--rhs", &rhs]);
    assert!(ok.status.success());
    let exact = flagsos(&["verify", "identity", "--lhs", &lhs, "--rhs", &rhs, "--mode", "exact-coefficient"]);
    assert_eq!(exact.status.code(), Some(2));
}

#[test]
fn budget_errors_use_code_4() {
    let out = flagsos(&["verify", "identity", "--n", "7"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn spec_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"forbidden":{"n":3,"edges":[[1,2],[1,3],[2,3]]},"t":1,"f":2,"m":4}"#);
    assert_eq!(json(&flagsos(&["enumerate", "--spec", &spec]))["hosts"], 7);
    assert_eq!(json(&flagsos(&["enumerate", "--spec", &spec, "--m", "3"]))["hosts"], 3);
    let bad = write(dir.path(), "bad.json", r#"{"bogus":1}"#);
    assert_eq!(flagsos(&["enumerate", "--spec", &bad]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let a = flagsos(&["solve", "--f", "3", "--m", "5"]);
    let b = flagsos(&["solve", "--f", "3", "--m", "5", "--threads", "1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["bound"], "1/2");
}

#[test]
fn demo_matches_known_values() {
    let out = flagsos(&["--demo", "mantel"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains(" NO"));
    assert!(text.contains("exact bound"));
}
