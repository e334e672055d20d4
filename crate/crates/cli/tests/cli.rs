use std::process::{Command, Output};

use serde_json::Value;

fn hassett(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hassett"))
        .args(args)
        .env_remove("HASSETT_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn euler_both_methods_agree() {
    let out = hassett(&["euler", "--g", "1", "--w", "1^3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["direct"], 2);
    assert_eq!(v["formula"], "2");
    assert_eq!(v["agree"], true);
}

#[test]
fn heavy_light_uses_the_double_sum() {
    let out = hassett(&["euler", "--g", "2", "--n", "3", "--m", "2", "--heavy-light"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["formula"], "-7");
    assert_eq!(v["formula_source"], "heavy-light");
    assert_eq!(v["direct"], -7);
}

#[test]
fn formula_only_skips_enumeration() {
    let out = hassett(&["euler", "--g", "0", "--n", "5", "--m", "4", "--method", "formula"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["formula"], "-1535");
    assert!(v["direct"].is_null());
}

#[test]
fn enumeration_is_identical_across_worker_counts() {
    let base = hassett(&["enumerate", "--g", "1", "--w", "1,1,eps^2", "--workers", "1"]);
    assert_eq!(base.status.code(), Some(0));
    for workers in ["2", "4"] {
        let other = hassett(&["enumerate", "--g", "1", "--w", "1,1,eps^2", "--workers", workers]);
        assert_eq!(other.stdout, base.stdout, "workers = {workers}");
    }
}

#[test]
fn enumeration_reports_every_stratum() {
    let v = json(&hassett(&["enumerate", "--g", "1", "--w", "eps^3"]));
    let classes: Vec<u64> = v["strata"].as_array().unwrap().iter().map(|s| s["classes"].as_u64().unwrap()).collect();
    assert_eq!(classes, [1, 3, 1]);
    let single = json(&hassett(&["enumerate", "--g", "1", "--w", "eps^3", "--stratum", "2"]));
    assert_eq!(single["strata"].as_array().unwrap().len(), 1);
}

#[test]
fn homology_csv() {
    let out = hassett(&["homology", "--g", "1", "--w", "eps^3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("degree,rank,betti,reduced_betti\n"));
    assert!(text.contains("\n2,1,1,1\n"));
}

#[test]
fn loop_weight_subcomplex_is_acyclic() {
    let v = json(&hassett(&["homology", "--g", "2", "--w", "1", "--filter", "lw"]));
    assert!(v["reduced_betti"].as_array().unwrap().iter().all(|b| b == 0));
    assert_eq!(v["reduced_betti_minus_one"], 0);
}

#[test]
fn table_check_passes() {
    let out = hassett(&["table", "--check", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "2,6,-419,2941,-20579,144061"));
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["euler", "--g", "0", "--w", "1,3/2"][..],
        &["euler", "--g", "0", "--w", "1,1"],
        &["enumerate", "--g", "1", "--w", "1,,1"],
        &["enumerate", "--g", "1", "--w", "1/0"],
        &["euler", "--g", "1", "--w", "1", "--n", "2", "--m", "1"],
    ] {
        let out = hassett(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hassett"))
        .args(["enumerate", "--g", "0", "--w", "1^5"])
        .env("HASSETT_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert_eq!(hassett(&["enumerate", "--g", "0", "--w", "1^5", "--budget", "1000"]).status.code(), Some(0));
}

#[test]
fn verify_small_matrix() {
    let out = hassett(&["verify", "--max-genus", "1", "--max-edges", "5", "--max-markings", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["passed"], true);
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn injected_sign_flip_is_caught() {
    let out = hassett(&["verify", "--max-genus", "1", "--max-edges", "5", "--max-markings", "3", "--inject-sign-flip"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert!(v["failed"].as_u64().unwrap() > 0);
    assert_eq!(v["passed"], false);
}
