use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn singlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singlab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("SINGLAB_N")
        .env_remove("SINGLAB_P")
        .env_remove("SINGLAB_CONFIG")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v["config"].as_object_mut().unwrap().remove("out");
    v
}

#[test]
fn malformed_exponent_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["pohozaev", "--p", "x/y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn config_problems_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep", "--experiments", "nonsense"][..],
        &["rate-fit", "--window", "0.5:0.1"],
        &["pohozaev", "--n", "9", "--p", "3/2"],
        &["verify-coefficients", "--table", "nope", "--entry", "K3"],
        &["equilibrium", "--rel-tol", "2"],
    ] {
        assert_eq!(singlab(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 3\n").unwrap();
    let out = singlab(dir.path(), &["equilibrium", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_entry_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["verify-coefficients", "--table", "autonomous", "--entry", "K3", "--n", "9", "--p", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert_eq!(r["checks"].as_array().unwrap().len(), 1);
    assert!(r["checks"][0]["detail"].as_str().unwrap().contains("sign-flip"));
    let out = singlab(dir.path(), &["verify-coefficients", "--table", "autonomous", "--entry", "K5", "--n", "9", "--p", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn full_verification_lists_documented_discrepancies_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["verify-coefficients"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert!(r["data"]["undocumented_discrepancies"].as_array().unwrap().is_empty());
    assert!(!r["data"]["discrepant_entries"].as_array().unwrap().is_empty());
    assert!(dir.path().join("summary.txt").exists());
}

#[test]
fn gidas_spruck_pohozaev_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["pohozaev", "--n", "9", "--p", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("pohozaev.csv")).unwrap();
    assert!(csv.starts_with("t,P,dP_numeric,dP_formula"));
    assert!(csv.lines().count() > 100);
    assert!(dir.path().join("trajectory.csv").exists());
}

#[test]
fn upper_critical_checks_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["pohozaev", "--n", "9", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "conservation" && c["passed"] == true));
}

#[test]
fn critical_exponent_routes_to_nonautonomous_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = singlab(dir.path(), &["pohozaev", "--n", "12", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["data"]["regime"], "aviles");
    assert!(r["data"]["probe"].is_object());
    let csv = std::fs::read_to_string(dir.path().join("pohozaev.csv")).unwrap();
    assert!(csv.starts_with("t,P\n"));
}

#[test]
fn rate_fit_probes() {
    let dir = tempfile::tempdir().unwrap();
    for probe in ["trajectory", "aviles-ansatz", "serrin-lions"] {
        let out = singlab(dir.path(), &["rate-fit", "--probe", probe, "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0), "{probe}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("check,passed,detail"));
    }
    assert!(dir.path().join("ratefit.json").exists());
    assert!(dir.path().join("profile.csv").exists());
}

#[test]
fn reports_are_reproducible_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--n-list", "9,10", "--p-list", "3,4", "--experiments", "equilibrium,pohozaev,sign-profile"];
    assert_eq!(singlab(dir.path(), &args).status.code(), Some(0));
    let first = report(dir.path());
    assert_eq!(first["timing"]["cache_hits"], 0);
    assert_eq!(singlab(dir.path(), &args).status.code(), Some(0));
    let second = report(dir.path());
    assert_eq!(second["timing"]["cache_hits"], 12);
    assert_eq!(without_timing(first), without_timing(second.clone()));

    let fresh = tempfile::tempdir().unwrap();
    assert_eq!(singlab(fresh.path(), &args).status.code(), Some(0));
    assert_eq!(without_timing(report(fresh.path())), without_timing(second));
}

#[test]
fn config_file_sections_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.toml");
    std::fs::write(&cfg, "n = 10\np = \"5\"\n[equilibrium]\nn = 11\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_singlab"))
        .args(["equilibrium", "--out"])
        .arg(dir.path())
        .env("SINGLAB_CONFIG", &cfg)
        .env("SINGLAB_P", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["config"]["n"], 11);
    assert_eq!(r["config"]["p"], "3");
}
