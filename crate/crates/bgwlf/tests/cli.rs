use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn bgwlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgwlf")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("bgwlf-{}-{name}", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn law_survival_at_three() {
    let out = bgwlf(&["law", "--pi0", "0.4", "--pi", "0.6", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"survival\":0.3333333333"), "{text}");
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["n"], 3);
    assert!((doc["mean"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((doc["variance"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn law_csv_is_the_pmf_table() {
    let out = bgwlf(&["law", "--pi0", "0.4", "--pi", "0.6", "--n", "3", "--kmax", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,pmf");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,0.6666666666666667"));
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = bgwlf(&["law", "--pi0", "0.4", "--pi", "0.6", "--n", "1", "--kmax", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"pi0\":0.40000000000000002"), "{text}");
}

#[test]
fn mechanism_files() {
    let lf = temp_file("lf.json", r#"{"pi0":0.3,"pi":0.4}"#);
    let out = bgwlf(&["progeny", "--mech", lf.to_str().unwrap(), "--pmf-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!((doc["extinction"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["table"][1]["pmf"].as_f64().unwrap() - 0.3).abs() < 1e-15);

    let bin = temp_file("bin.json", r#"{"kind":"binary","p":0.25,"q":0.25,"r":0.5}"#);
    let out = bgwlf(&["rw", "--mech", bin.to_str().unwrap(), "--width", "1", "--nmax", "1"]);
    let doc = json(&out);
    assert!((doc["table"][0]["width_cdf"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["table"][1]["width_cdf"].as_f64().unwrap() - 11.0 / 16.0).abs() < 1e-12);
    assert!((doc["table"][1]["walk_max_cdf"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bgwlf(&["nope"]).status.code(), Some(1));
    assert_eq!(bgwlf(&["law", "--pi0", "0.4"]).status.code(), Some(1));
    assert_eq!(bgwlf(&["law", "--pi0", "1.4", "--pi", "0.6", "--n", "2"]).status.code(), Some(1));
    assert_eq!(bgwlf(&["condition", "--pi0", "0.6", "--pi", "0.5", "--transform", "q"]).status.code(), Some(1));
    assert_eq!(bgwlf(&["verify", "--suite", "bogus"]).status.code(), Some(1));
    assert_eq!(bgwlf(&["--help"]).status.code(), Some(0));
}

#[test]
fn conditioning_transforms() {
    let out = bgwlf(&["condition", "--pi0", "0.3", "--pi", "0.4", "--transform", "q", "--kmax", "2"]);
    let doc = json(&out);
    assert!((doc["rho"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["table"][0]["invariant"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    for t in ["hs", "immortal", "critical", "spectrum"] {
        assert_eq!(bgwlf(&["condition", "--pi0", "0.3", "--pi", "0.4", "--transform", t]).status.code(), Some(0), "{t}");
    }
}

#[test]
fn sterile_modes() {
    let out = bgwlf(&["sterile", "--pi0", "0.4", "--pi", "0.3", "--mode", "exceedance"]);
    let doc = json(&out);
    assert!((doc["rho"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    for m in ["at-n", "cumulated", "vs-current", "ratio"] {
        let out = bgwlf(&["sterile", "--pi0", "0.3", "--pi", "0.4", "--mode", m, "--n", "3"]);
        assert_eq!(out.status.code(), Some(0), "{m}");
    }
}

#[test]
fn rw_resolvent_and_first_passage() {
    let out = bgwlf(&["rw", "--pi0", "0.3", "--pi", "0.4", "--resolvent", "--first-passage", "1", "--nmax", "3"]);
    let doc = json(&out);
    assert!((doc["resolvent"]["g"].as_f64().unwrap() - 7.0 / 3.0).abs() < 1e-9);
    assert!((doc["resolvent"]["return_probability"].as_f64().unwrap() - 4.0 / 7.0).abs() < 1e-9);
    assert!((doc["table"][0]["pmf"].as_f64().unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn srw_extracts_the_worked_path() {
    let body = "0\n1\n2\n3\n2\n3\n4\n3\n4\n3\n4\n5\n4\n3\n4\n3\n2\n1\n0\n";
    let f = temp_file("worked.txt", body);
    let out = bgwlf(&["srw", "--p", "0.5", "--q", "0.5", "--extract", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let n = &json(&out)["nested"];
    assert_eq!(n["n"], serde_json::json!([1, 1, 2, 4, 1]));
    assert_eq!((n["h"].as_u64(), n["theta"].as_u64(), n["nbar"].as_u64()), (Some(5), Some(17), Some(9)));
    assert_eq!((n["area"].as_u64(), n["restricted_area"].as_u64()), (Some(51), Some(42)));

    let bad = temp_file("bad.txt", "1\n0\n");
    assert_eq!(bgwlf(&["srw", "--p", "0.5", "--q", "0.5", "--extract", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn srw_verify_flags_holding_walks() {
    let out = bgwlf(&["srw", "--verify", "--p", "0.3", "--q", "0.3", "--r", "0.4"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    let checks = doc["table"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["identity"].is_string() && c["pass"].is_boolean() && c["note"].is_string()));
    assert!(checks.iter().any(|c| c["ks_stat"].is_number()));
    assert!(checks.iter().all(|c| c["status"] != "fail"));
}

#[test]
fn srw_verify_passes_without_holds() {
    let out = bgwlf(&["srw", "--verify", "--p", "0.4", "--q", "0.6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_exact_exits_zero() {
    let out = bgwlf(&["verify", "--suite", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["exit_code"], 0);
}

#[test]
fn verify_claims_only_flags() {
    assert_eq!(bgwlf(&["verify", "--suite", "claims"]).status.code(), Some(3));
}

#[test]
fn simulate_is_reproducible_across_workers() {
    let a = temp_file("a.csv", "");
    let b = temp_file("b.csv", "");
    let run = |out: &std::path::Path, workers: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_bgwlf"))
            .args(["simulate", "--pi0", "0.4", "--pi", "0.6", "--replicas", "500", "--workers", workers, "--out"])
            .arg(out)
            .env("BGWLF_SEED", "7")
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        json(&o)
    };
    let da = run(&a, "1");
    let db = run(&b, "3");
    assert_eq!(da["seed"], 7);
    assert_eq!(da["extinct_fraction"], db["extinct_fraction"]);
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(ta.starts_with("replica,extinct,exploded,height,width,total,leaves\n0,true,"));
    assert_eq!(ta.lines().count(), 501);
}
