use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn tandem(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tandem"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str], stdin: Option<&str>) -> String {
    let out = tandem(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

fn json(args: &[&str], stdin: Option<&str>) -> Value {
    serde_json::from_str(&stdout(args, stdin)).unwrap()
}

#[test]
fn baxter_three() {
    assert_eq!(stdout(&["closed-form", "baxter", "--n", "3"], None), "6");
}

#[test]
fn five_triangulations() {
    let args = ["count", "--p", "1", "--z", "0,1", "--from", "0,0", "--to", "0,0", "--len", "6", "--region", "quadrant"];
    assert_eq!(stdout(&args, None), "5");
}

#[test]
fn rational_counts_print_as_fractions() {
    let args = ["count", "--z", "1/2,1/3", "--from", "0,0", "--to", "0,0", "--len", "2"];
    // Only F(0,0) twice; the SE step cannot start on the x-axis.
    assert_eq!(stdout(&args, None), "1/4");
}

#[test]
fn closed_forms() {
    assert_eq!(stdout(&["closed-form", "tutte", "--k", "2"], None), "5");
    assert_eq!(stdout(&["closed-form", "dang", "--p", "2", "--k", "4"], None), "14");
    assert_eq!(stdout(&["closed-form", "lgv", "--n", "4", "--k", "2"], None), "1");
    assert_eq!(stdout(&["closed-form", "p1-endpoint", "--n", "1", "--i", "0", "--j", "1"], None), "1");
}

#[test]
fn empty_walk_gives_unit_orientation() {
    let o = json(&["bijection", "phi"], Some(r#"{"steps":[]}"#));
    assert_eq!(o["vertices"], 2);
    assert_eq!(o["edges"], serde_json::json!([[0, 1, "plain"]]));
}

#[test]
fn bijection_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("tandem-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let walk = dir.join("walk.json");
    let walk_text = r#"{"steps":[["F",0,2],["SE"],["F",1,1],["SE"],["SE"],["F",2,0]]}"#;
    std::fs::write(&walk, walk_text).unwrap();
    let map = stdout(&["bijection", "phi", "--in", walk.to_str().unwrap()], None);
    let report = json(&["validate"], Some(&map));
    assert_eq!(report["valid"], true);
    let back = json(&["bijection", "phi-inverse"], Some(&map));
    assert_eq!(back, serde_json::from_str::<Value>(walk_text).unwrap());
    // σ on maps and on walks agree.
    let sigma_map = stdout(&["bijection", "sigma"], Some(&map));
    let via_map = json(&["bijection", "phi-inverse"], Some(&sigma_map));
    let via_walk = json(&["bijection", "sigma"], Some(walk_text));
    assert_eq!(via_map, via_walk);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_map_is_a_domain_error() {
    let bad = r#"{"vertices":2,"edges":[[1,0,"plain"]],"rot":[[1],[0]],"S":0,"N":1,"vl":0,"vr":1}"#;
    assert_eq!(tandem(&["validate"], Some(bad)).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(tandem(&["count", "--nonsense"], None).status.code(), Some(2));
    assert_eq!(tandem(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(tandem(&["bijection", "phi"], Some("not json")).status.code(), Some(2));
    assert_eq!(tandem(&["sample", "excursion-p1", "--n", "4"], None).status.code(), Some(1));
    let mismatch = ["count", "--p", "2", "--z", "0,1", "--from", "0,0", "--len", "1"];
    assert_eq!(tandem(&mismatch, None).status.code(), Some(2));
}

#[test]
fn series_output() {
    let v = json(&["series", "--formula", "q11", "--order", "5"], None);
    assert_eq!(v, serde_json::json!(["1", "1", "2", "4", "9", "21"]));
    let v = json(&["series", "--formula", "invariant", "--z", "1/2,0,0,1/6", "--order", "6"], None);
    assert!(v.as_array().unwrap().iter().all(|c| c == "0"));
    let v = json(&["series", "--formula", "oned", "--w", "1,0,1", "--order", "6"], None);
    assert_eq!(v, serde_json::json!(["0", "1", "0", "1", "0", "2", "0"]));
}

#[test]
fn asymptotics_and_harmonic() {
    let v = json(&["asymptotics", "--omega", "3", "--b", "0", "--c", "0"], None);
    let want = 243.0 / (3f64.sqrt() * std::f64::consts::PI);
    assert!((v["kappa"].as_f64().unwrap() / want - 1.0).abs() < 1e-12);
    assert_eq!(v["iota"], 3);
    let h = json(&["harmonic", "--p", "1", "--a", "2", "--b", "3"], None);
    assert_eq!(h["sigma_v"], "252");
    assert_eq!(h["sigma2"], "1/3");
    let v = h["v"].as_f64().unwrap();
    assert!((v - 252.0 * 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn sampling_is_deterministic_and_emits_files() {
    let a = stdout(&["sample", "quadrant", "--n", "40", "--seed", "9", "--w", "1,1,1"], None);
    let b = stdout(&["sample", "quadrant", "--n", "40", "--seed", "9", "--w", "1,1,1"], None);
    assert_eq!(a, b);
    let dir = std::env::temp_dir().join(format!("tandem-emit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for ext in ["json", "svg", "dot"] {
        let path = dir.join(format!("out.{ext}"));
        stdout(&["sample", "excursion-p1", "--n", "12", "--seed", "1", "--emit", path.to_str().unwrap()], None);
        let body = std::fs::read_to_string(&path).unwrap();
        match ext {
            "json" => assert!(body.starts_with("{\"steps\":")),
            "svg" => assert!(body.contains("<polyline")),
            _ => assert!(body.starts_with("digraph")),
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn windowed_sampler_reports_metadata() {
    let out = tandem(&["sample", "excursion-window", "--n", "8", "--seed", "4"], None);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("retries=") && err.contains("rejections="));
}

#[test]
fn render() {
    let w = r#"{"steps":[["F",0,1],["SE"]]}"#;
    assert!(stdout(&["render", "--svg"], Some(w)).starts_with("<svg"));
    assert!(stdout(&["render", "--dot"], Some(w)).contains("->"));
}

#[test]
fn verify_fast_subset() {
    let v = json(&["verify", "asymptotics", "--fast"], None);
    assert_eq!(v["passed"], true);
    let ids: Vec<u64> = v["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![9, 11, 12]);
}
