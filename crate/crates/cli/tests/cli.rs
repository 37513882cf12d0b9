use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use gmforms_core::quadclass::ClassGroupSummary;
use gmforms_core::verifier::{SuiteSummary, Verdict, VerificationRecord};

fn gmforms(args: &[&str]) -> Output {
    gmforms_env(args, &[])
}

/// Runs with a scratch `HOME` so no user config leaks in.
fn gmforms_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let home = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gmforms"));
    cmd.args(args)
        .env("HOME", home.path())
        .env_remove("GMFORMS_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timestamp(mut v: Value) -> Value {
    let ts = v
        .as_object_mut()
        .unwrap()
        .remove("generated_at")
        .expect("generated_at present");
    assert!(ts.as_str().unwrap().ends_with('Z'));
    v
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares against `tests/golden/<name>`; `GMFORMS_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("GMFORMS_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden {name} differs");
}

#[test]
fn scan_lists_known_exponents() {
    let out = gmforms(&["scan", "--pmin", "3", "--pmax", "120", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let ps: Vec<u64> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["p"].as_u64().unwrap())
        .collect();
    assert_eq!(ps, [3, 5, 7, 11, 19, 29, 47, 73, 79, 113]);
    assert_eq!(v["summary"]["probable_primes"], 10);
    assert_eq!(v["records"][2]["value"], "113");
    assert_eq!(
        v["records"][9]["value"],
        "10384593717069655112945804582584321"
    );
}

#[test]
fn scan_gap_and_bad_ranges() {
    let out = gmforms(&["scan", "--pmin", "48", "--pmax", "72", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["records"].as_array().unwrap().is_empty());
    assert_eq!(code(&gmforms(&["scan", "--pmin", "50", "--pmax", "10"])), 2);
    assert_eq!(code(&gmforms(&["scan", "--pmin", "2", "--pmax", "10"])), 2);
    assert_eq!(code(&gmforms(&["scan", "--pmax", "1201"])), 2);
    assert_eq!(code(&gmforms(&["scan"])), 2);
}

#[test]
fn represent_exit_codes() {
    let out = gmforms(&["represent", "--p", "47", "--d", "7", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let rep = &json(&out)["records"][0]["representation"];
    assert_eq!(rep["x"], "5732351");
    assert_eq!(rep["y"], "3925696");

    let out = gmforms(&["represent", "--p", "7", "--d", "14"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("none"));

    assert_eq!(code(&gmforms(&["represent", "--p", "4", "--d", "7"])), 2);
    assert_eq!(code(&gmforms(&["represent", "--p", "7", "--d", "0"])), 2);
    assert_eq!(code(&gmforms(&["represent", "--p", "7", "--d", "-7"])), 2);
}

#[test]
fn verify_small_range_confirms() {
    let out = gmforms(&["verify", "--pmax", "120", "--d", "7", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let confirmed: Vec<u64> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == "confirmed")
        .map(|r| r["p"].as_u64().unwrap())
        .collect();
    assert_eq!(confirmed, [47, 73, 79, 113]);
    assert_eq!(v["records"][2]["p"], 7);
    assert_eq!(v["records"][2]["verdict"], "out_of_range");
    assert_eq!(v["summary"]["refuted"], 0);
}

#[test]
fn verify_to_600_reports_refutations_with_exit_3() {
    let out = gmforms(&["verify", "--pmax", "600", "--d", "7", "--emit", "json"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    let refuted: Vec<(u64, u64)> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == "refuted")
        .map(|r| (r["p"].as_u64().unwrap(), r["y_mod8"].as_u64().unwrap()))
        .collect();
    assert_eq!(refuted, [(239, 4), (353, 4), (457, 4)]);

    let strict = gmforms(&["verify", "--pmax", "600", "--d", "7", "--strict"]);
    assert_eq!(code(&strict), 3);
}

#[test]
fn verify_argument_errors() {
    assert_eq!(
        code(&gmforms(&[
            "verify",
            "--pmax",
            "600",
            "--d",
            "9",
            "--generalized"
        ])),
        2
    );
    assert_eq!(code(&gmforms(&["verify", "--pmax", "600", "--d", "31"])), 2);
    assert_eq!(
        code(&gmforms(&[
            "verify",
            "--pmax",
            "600",
            "--d",
            "175",
            "--generalized"
        ])),
        2
    );
    assert_eq!(code(&gmforms(&["verify", "--pmax", "5"])), 2);
}

#[test]
fn classgroup_queries() {
    let out = gmforms(&["classgroup", "-56", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["records"][0]["h"], 4);
    assert_eq!(v["records"][0]["cyclic_orders"], serde_json::json!([4]));
    assert_eq!(v["records"][0]["has_order_4_element"], true);

    let v = json(&gmforms(&["classgroup", "-28", "--emit", "json"]));
    assert_eq!(v["summary"]["h"], 1);
    let v = json(&gmforms(&["classgroup", "-7", "--emit", "json"]));
    assert_eq!(
        v["records"][0]["forms"],
        serde_json::json!([{"a": "1", "b": "1", "c": "2"}])
    );

    assert_eq!(code(&gmforms(&["classgroup", "-5"])), 2);
    assert_eq!(code(&gmforms(&["classgroup", "12"])), 2);
    assert_eq!(code(&gmforms(&["classgroup", "0"])), 2);
}

#[test]
fn congruences_table() {
    let out = gmforms(&["congruences", "--p", "47"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("all applicable predictions hold"));
    let v = json(&gmforms(&["congruences", "--p", "11", "--emit", "json"]));
    let rec = &v["records"][0];
    assert_eq!(rec["actual_mod8"], 1);
    assert_eq!(rec["prediction"]["applicable"]["mod16"], false);
}

#[test]
fn json_round_trips_through_core_types() {
    let out = gmforms(&[
        "verify",
        "--pmax",
        "200",
        "--d",
        "7,31",
        "--generalized",
        "--emit",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let records: Vec<VerificationRecord> = serde_json::from_value(v["records"].clone()).unwrap();
    let summary: SuiteSummary = serde_json::from_value(v["summary"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&records).unwrap(), v["records"]);
    assert_eq!(serde_json::to_value(&summary).unwrap(), v["summary"]);
    assert_eq!(SuiteSummary::tally(&records).confirmed, summary.confirmed);
    let keys: Vec<(u64, u64)> = records.iter().map(|r| (r.p, r.d)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in records.iter().filter(|r| r.verdict == Verdict::Confirmed) {
        assert!(r.representation.as_ref().unwrap().holds());
    }

    let v = json(&gmforms(&["classgroup", "-84", "--emit", "json"]));
    let groups: Vec<ClassGroupSummary> = serde_json::from_value(v["records"].clone()).unwrap();
    assert_eq!(groups[0].cyclic_orders, [2, 2]);
    assert_eq!(serde_json::to_value(&groups).unwrap(), v["records"]);
}

#[test]
fn output_is_deterministic_across_runs_and_workers() {
    let args = [
        "verify",
        "--pmax",
        "400",
        "--d",
        "7,31,79",
        "--generalized",
        "--emit",
        "json",
    ];
    let one = gmforms(&[&args[..], &["--workers", "1"]].concat());
    let four = gmforms(&[&args[..], &["--workers", "4"]].concat());
    let again = gmforms(&[&args[..], &["--workers", "4"]].concat());
    let a = without_timestamp(json(&one));
    assert_eq!(a, without_timestamp(json(&four)));
    assert_eq!(a, without_timestamp(json(&again)));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = gmforms(&[
        "scan",
        "--pmax",
        "50",
        "--emit",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "scan");
}

#[test]
fn progress_goes_to_stderr() {
    let out = gmforms(&["scan", "--pmax", "50", "--emit", "json"]);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("scan:"));
    let v = json(&out);
    assert_eq!(v["command"], "scan");
}

#[test]
fn config_file_sets_cap_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("gmforms.conf");
    std::fs::write(&conf, "p_cap = 100\nworkers = 2\n").unwrap();
    let conf = conf.to_str().unwrap();

    assert_eq!(
        code(&gmforms(&["--config", conf, "scan", "--pmax", "120"])),
        2
    );
    assert_eq!(
        code(&gmforms_env(
            &["scan", "--pmax", "120"],
            &[("GMFORMS_CONFIG", conf)]
        )),
        2
    );
    assert_eq!(
        code(&gmforms_env(
            &["scan", "--pmax", "90"],
            &[("GMFORMS_CONFIG", conf)]
        )),
        0
    );
    let out = gmforms_env(
        &["scan", "--pmax", "90", "--workers", "3"],
        &[("GMFORMS_CONFIG", conf)],
    );
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("on 3 workers"));

    std::fs::write(dir.path().join("bad.conf"), "threads = 2\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(
        code(&gmforms(&[
            "--config",
            bad.to_str().unwrap(),
            "scan",
            "--pmax",
            "50"
        ])),
        2
    );
    assert_eq!(
        code(&gmforms(&[
            "--config",
            "/nonexistent/gmforms.conf",
            "scan",
            "--pmax",
            "50"
        ])),
        2
    );
}

#[test]
fn golden_verify_120_json() {
    let out = gmforms(&["verify", "--pmax", "120", "--d", "7", "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let mut text = serde_json::to_string_pretty(&without_timestamp(json(&out))).unwrap();
    text.push('\n');
    check_golden("verify_120_d7.json", &text);
}

#[test]
fn golden_verify_600_generalized_json() {
    let out = gmforms(&[
        "verify",
        "--pmax",
        "600",
        "--d",
        "7,31",
        "--generalized",
        "--emit",
        "json",
    ]);
    assert_eq!(code(&out), 3);
    let mut text = serde_json::to_string_pretty(&without_timestamp(json(&out))).unwrap();
    text.push('\n');
    check_golden("verify_600_d7_31.json", &text);
}

#[test]
fn golden_verify_600_table() {
    let out = gmforms(&["verify", "--pmax", "600", "--d", "7"]);
    assert_eq!(code(&out), 3);
    check_golden("verify_600_d7.txt", &stdout(&out));
}

#[test]
fn golden_classgroup_table() {
    let out = gmforms(&["classgroup", "-56"]);
    assert_eq!(code(&out), 0);
    check_golden("classgroup_-56.txt", &stdout(&out));
}
