use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmono"))
        .args(args)
        .env_remove("QMONO_SEED")
        .output()
        .unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = qmono(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend_from_slice(&["--format", "json"]);
    serde_json::from_str(&stdout_of(&all)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn bound<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == name)
        .unwrap()
}

#[test]
fn protocol_run_on_exported_files() {
    let dir = tempfile::tempdir().unwrap();
    let prot = write(dir.path(), "shifts.json", &stdout_of(&["protocol", "export", "shifts"]));
    let pair = write(
        dir.path(),
        "pair.json",
        &stdout_of(&["ensemble", "export", "--case", "V-shifts", "--pair", "A:B1"]),
    );
    let v = json_of(&["protocol", "run", "--protocol", &prot, "--ensemble", &pair]);
    let info = v["mutual_information"].as_f64().unwrap();
    assert!((info - 1.20443).abs() < 1e-5, "{info}");
    let table = stdout_of(&["protocol", "run", "--protocol", &prot, "--ensemble", &pair]);
    assert!(table.contains("mutual_information 1.204434"), "{table}");
}

#[test]
fn optimize_e1_pair() {
    let args = [
        "optimize",
        "--case",
        "II-E1",
        "--pair",
        "A:B1",
        "--restarts",
        "8",
        "--seed",
        "1",
    ];
    let table = stdout_of(&args);
    assert!(table.contains("1.000000"), "{table}");
    let v = json_of(&args);
    assert!((v["certified"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["result"]["seed"], 1);
    assert!(v["protocol"]["operators"].is_array());
}

#[test]
fn monogamy_on_qutrit_ensemble() {
    let v = json_of(&["monogamy", "--case", "IV-ET"]);
    assert_eq!(v["verdict"], "violated");
    assert!((v["sum_lower"].as_f64().unwrap() - 2.0 * 3f64.log2()).abs() < 1e-6);
    assert_eq!(v["maximal"], true);
}

#[test]
fn bounds_reports() {
    let ep = json_of(&["bounds", "--case", "IV-EP"]);
    assert!((bound(&ep, "holevo_chi")["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let single = write(
        dir.path(),
        "single.json",
        r#"{"dims": [2, 2], "elements": [{"p": 1.0, "label": "only", "vector": [[1,0],[0,0],[0,0],[0,0]]}]}"#,
    );
    let v = json_of(&["bounds", "--ensemble", &single, "--seed", "2", "--samples", "5000"]);
    for b in v["bounds"].as_array().unwrap() {
        assert!(b["value"].as_f64().unwrap().abs() < 1e-9, "{b}");
    }

    let pair = json_of(&[
        "bounds",
        "--case",
        "V-shifts",
        "--pair",
        "A:B1",
        "--seed",
        "7",
        "--samples",
        "20000",
    ]);
    assert!((bound(&pair, "chi_locc")["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let lam = bound(&pair, "lambda_locc");
    assert_eq!(lam["samples"], 20000);
    assert_eq!(lam["seed"], 7);
    assert!(lam["standard_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn table_numbers_match_json() {
    let args = [
        "bounds",
        "--case",
        "V-shifts",
        "--pair",
        "A:B1",
        "--seed",
        "7",
        "--samples",
        "20000",
    ];
    let table = stdout_of(&args);
    let v = json_of(&args);
    for b in v["bounds"].as_array().unwrap() {
        let name = b["name"].as_str().unwrap();
        let line = table.lines().find(|l| l.starts_with(name)).unwrap();
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[1], format!("{:.6}", b["value"].as_f64().unwrap()), "{name}");
        assert_eq!(
            cells[2],
            format!("{:.6}", b["standard_error"].as_f64().unwrap()),
            "{name}"
        );
    }
}

#[test]
fn seed_policy_and_env_fallback() {
    let out = qmono(&["bounds", "--case", "V-shifts", "--pair", "A:B1", "--samples", "5000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let with_env = Command::new(env!("CARGO_BIN_EXE_qmono"))
        .args([
            "bounds",
            "--case",
            "V-shifts",
            "--pair",
            "A:B1",
            "--samples",
            "5000",
            "--format",
            "json",
        ])
        .env("QMONO_SEED", "9")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    let flag = stdout_of(&[
        "bounds",
        "--case",
        "V-shifts",
        "--pair",
        "A:B1",
        "--samples",
        "5000",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), flag);

    let unseeded = stdout_of(&["bounds", "--case", "V-shifts", "--pair", "A:B1"]);
    assert!(unseeded.contains("lambda_locc skipped"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["reproduce", "--case", "VI"],
        vec!["reproduce", "--case", "II", "--n", "4"],
        vec!["bounds", "--case", "V-shifts", "--n", "3"],
        vec!["bounds"],
        vec!["bounds", "--ensemble", "/nonexistent/file.json"],
        vec!["bounds", "--case", "V-shifts", "--pair", "B1:A"],
        vec!["optimize", "--case", "III-cat", "--n", "3", "--template", "one-way"],
        vec!["monogamy", "--case", "V-shifts", "--format", "xml"],
    ] {
        assert_eq!(qmono(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_files_report_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dims": [2], "elements": [{"p": 0.9, "label": "a", "vector": [[1,0],[0,0]]}]}"#,
    );
    let out = qmono(&["ensemble", "validate", "--ensemble", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("probabilities must sum to 1"));

    let prot = write(dir.path(), "prot.json", "{\"party\": 0,\n \"operators\": [");
    let out = qmono(&["protocol", "run", "--protocol", &prot, "--case", "V-shifts"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn ensemble_round_trip_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "e3.json",
        &stdout_of(&["ensemble", "export", "--case", "II-E3"]),
    );
    let v = json_of(&["ensemble", "validate", "--ensemble", &file]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["cardinality"], 2);
    assert_eq!(v["dims"], serde_json::json!([2, 2, 2]));
}

#[test]
fn reproduce_exit_codes() {
    let out = qmono(&["reproduce", "--case", "I"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all 6 checks passed"), "{text}");

    let v = json_of(&["reproduce", "--case", "V"]);
    assert_eq!(v["passed"], true);
    let sum = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["quantity"] == "sum_lower")
        .unwrap();
    assert!(sum["computed"].as_f64().unwrap() >= 2.40887 - 1e-5);

    let out = qmono(&["reproduce", "--case", "III", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("10.000000"));

    // The sampled local-subentropy bound disagrees with the quoted 0.27865,
    // which makes this reproduction fail.
    let out = qmono(&["reproduce", "--case", "V", "--seed", "7", "--samples", "200000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("lambda_locc A:B1"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.display().to_string();
    let out = qmono(&["monogamy", "--case", "II-E1", "--format", "json", "--out", &p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "violated");
}
