use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn unsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unsplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn check(report: &Value, name: &str) -> bool {
    report["certificate"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("missing check {name}"))["passed"]
        .as_bool()
        .unwrap()
}

#[test]
fn parallel_fixture_rounds_at_no_extra_cost() {
    let out = unsplit(&["ssuf-round", path(&fixture("parallel.json"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "ssuf");
    assert_eq!(report["certificate"]["input_cost"], "3/2");
    assert_eq!(report["certificate"]["output_cost"], "1");
    assert_eq!(report["paths"], serde_json::json!([[0]]));
    assert!(check(&report, "cost_bound"));
    assert_eq!(report["verification"]["verdict"], "pass");
}

#[test]
fn parallel_fixture_half_lambda() {
    let out = unsplit(&["ssuf-round", path(&fixture("parallel.json")), "--lambda", "1/2"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["certificate"]["lambda"], "1/2");
    assert_eq!(report["verification"]["verdict"], "pass");
}

#[test]
fn greedy_fpra_runs() {
    let out = unsplit(&[
        "ssuf-round",
        path(&fixture("parallel.json")),
        "--fpra",
        "greedy",
        "--report",
    ]);
    assert!(matches!(code(&out), 0 | 1));
    assert_eq!(stdout_json(&out)["fpra"]["name"], "greedy");
}

#[test]
fn negative_cost_rejected_below_one() {
    let out = unsplit(&[
        "ssuf-round",
        path(&fixture("parallel_negative.json")),
        "--lambda",
        "1/2",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["error"], "negative_costs");
    assert!(out.stdout.is_empty());
}

#[test]
fn negative_cost_allowed_at_one() {
    let out = unsplit(&["ssuf-round", path(&fixture("parallel_negative.json"))]);
    assert_eq!(code(&out), 0);
}

#[test]
fn malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"ssuf\", \"nodes\": [").unwrap();
    let out = unsplit(&["ssuf-round", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["error"], "input");
}

#[test]
fn missing_file_and_wrong_kind() {
    assert_eq!(code(&unsplit(&["ssuf-round", "/nonexistent/instance.json"])), 2);
    assert_eq!(code(&unsplit(&["ssuf-round", path(&fixture("ring_two.json"))])), 2);
    assert_eq!(code(&unsplit(&["ring-round", path(&fixture("parallel.json"))])), 2);
}

#[test]
fn lambda_out_of_range() {
    for lambda in ["0", "3/2", "-1/2", "x"] {
        let out = unsplit(&["ssuf-round", path(&fixture("parallel.json")), "--lambda", lambda]);
        assert_eq!(code(&out), 2, "lambda {lambda}");
    }
}

#[test]
fn missing_fractional_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture("parallel.json")).unwrap()).unwrap();
    doc.as_object_mut().unwrap().remove("fractional");
    let file = dir.path().join("bare.json");
    std::fs::write(&file, doc.to_string()).unwrap();
    assert_eq!(code(&unsplit(&["ssuf-round", path(&file)])), 2);
    let out = unsplit(&["ssuf-round", path(&file), "--solve-fractional"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    // The min-cost fractional flow already uses only the cheap arc.
    assert_eq!(report["instance"]["fractional"], serde_json::json!(["1", "0"]));
    assert_eq!(report["certificate"]["output_cost"], "1");
}

#[test]
fn ring_two_commodities() {
    let out = unsplit(&["ring-round", path(&fixture("ring_two.json")), "--alpha", "13/10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let cert = &report["certificate"];
    assert_eq!(cert["d_max"], "2");
    assert_eq!(cert["load_bound"], "26/5");
    assert!(check(&report, "load_upper_bound"));
    assert!(check(&report, "cost_bound"));
    assert_eq!(report["verification"]["verdict"], "pass");
}

#[test]
fn ring_two_commodities_uniform_search() {
    let out = unsplit(&[
        "ring-round",
        path(&fixture("ring_two.json")),
        "--search",
        "uniform",
        "--lambda",
        "1/2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ring_single_commodity() {
    let out = unsplit(&["ring-round", path(&fixture("ring_one.json"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["solution"].as_array().unwrap().len(), 1);
    assert_eq!(report["verification"]["verdict"], "pass");
}

#[test]
fn ring_enumeration_cap() {
    let out = unsplit(&[
        "ring-round",
        path(&fixture("ring_two.json")),
        "--alpha",
        "0",
        "--cap",
        "1",
    ]);
    assert_eq!(code(&out), 3);
    let diag = stderr_json(&out);
    assert_eq!(diag["error"], "too_large");
    assert_eq!(diag["size"], "4");
}

#[test]
fn ring_fpra_failure_carries_counterexample() {
    let out = unsplit(&["ring-round", path(&fixture("ring_two.json")), "--alpha", "0"]);
    assert_eq!(code(&out), 1);
    let diag = stderr_json(&out);
    assert_eq!(diag["error"], "no_solution_in_body");
    assert_eq!(diag["y_star"], serde_json::json!(["1/2", "1/3"]));
    assert!(diag["counterexample"]["free"].is_array());
}

#[test]
fn ring_rejects_greedy() {
    let out = unsplit(&["ring-round", path(&fixture("ring_two.json")), "--fpra", "greedy"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = unsplit(&["ssuf-round", path(&fixture("parallel.json")), "--out", path(&file)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let stdout = unsplit(&["ssuf-round", path(&fixture("parallel.json"))]).stdout;
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "ssuf", "--seed", "1", "--nodes", "5", "--terminals", "2"];
    let a = unsplit(&args);
    let b = unsplit(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let other = unsplit(&["generate", "ssuf", "--seed", "2", "--nodes", "5", "--terminals", "2"]);
    assert_ne!(a.stdout, other.stdout);
    let doc = stdout_json(&a);
    assert_eq!(doc["kind"], "ssuf");
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(doc["terminals"].as_array().unwrap().len(), 2);
    let ring = ["generate", "ring", "--seed", "4", "--commodities", "3"];
    assert_eq!(unsplit(&ring).stdout, unsplit(&ring).stdout);
}

#[test]
fn generate_zero_terminals() {
    let out = unsplit(&["generate", "ssuf", "--seed", "1", "--terminals", "0"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert!(doc["terminals"].as_array().unwrap().is_empty());
}

#[test]
fn generate_too_many_terminals() {
    let out = unsplit(&["generate", "ssuf", "--seed", "1", "--nodes", "3", "--terminals", "3"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["error"], "unsatisfiable_params");
}

#[test]
fn generated_instances_round_and_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, cmd) in [("ssuf", "ssuf-round"), ("ring", "ring-round")] {
        for seed in ["3", "11"] {
            let file = dir.path().join(format!("{kind}{seed}.json"));
            let gen = unsplit(&["generate", kind, "--seed", seed, "--out", path(&file)]);
            assert_eq!(code(&gen), 0);
            let a = unsplit(&[cmd, path(&file), "--lambda", "1/2"]);
            assert_eq!(
                code(&a),
                0,
                "{kind} seed {seed}: {}",
                String::from_utf8_lossy(&a.stderr)
            );
            let b = unsplit(&[cmd, path(&file), "--lambda", "1/2"]);
            assert_eq!(a.stdout, b.stdout);
        }
    }
}

#[test]
fn oracle_compare_default_campaign() {
    let out = unsplit(&["oracle-compare"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary = stdout_json(&out);
    assert_eq!(summary["instances"], 100);
    assert_eq!(summary["verdict"], "pass");
    for row in summary["checks"].as_array().unwrap() {
        assert_eq!(row["disagree"], 0, "{row}");
    }
    assert_eq!(unsplit(&["oracle-compare"]).stdout, out.stdout);
}

#[test]
fn oracle_compare_detects_injected_fault() {
    let out = unsplit(&["oracle-compare", "--instances", "10", "--inject-fault"]);
    assert_eq!(code(&out), 1);
    let summary = stdout_json(&out);
    assert_eq!(summary["verdict"], "fail");
    let disagreements = summary["disagreements"].as_array().unwrap();
    assert!(!disagreements.is_empty());
    assert!(disagreements[0]["instance"]["kind"].is_string());
}

#[test]
fn oracle_compare_empty_campaign() {
    let out = unsplit(&["oracle-compare", "--instances", "0"]);
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    assert_eq!(summary["verdict"], "pass");
    assert!(summary["disagreements"].as_array().unwrap().is_empty());
}

#[test]
fn verify_accepts_emitted_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [
        ("ssuf-round", "parallel.json"),
        ("ring-round", "ring_two.json"),
        ("ring-round", "ring_one.json"),
    ] {
        let file = dir.path().join(format!("{name}.report"));
        assert_eq!(code(&unsplit(&[cmd, path(&fixture(name)), "--out", path(&file)])), 0);
        let out = unsplit(&["verify", path(&file)]);
        assert_eq!(code(&out), 0, "{name}");
        assert_eq!(stdout_json(&out)["verdict"], "pass");
    }
}

#[test]
fn verify_rejects_tampered_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    assert_eq!(
        code(&unsplit(&[
            "ssuf-round",
            path(&fixture("parallel.json")),
            "--out",
            path(&file)
        ])),
        0
    );
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    report["certificate"]["output_cost"] = "1/2".into();
    std::fs::write(&file, report.to_string()).unwrap();
    let out = unsplit(&["verify", path(&file)]);
    assert_eq!(code(&out), 1);
    let verification = stdout_json(&out);
    assert_eq!(verification["verdict"], "fail");

    let ring = dir.path().join("ring.json");
    assert_eq!(
        code(&unsplit(&[
            "ring-round",
            path(&fixture("ring_two.json")),
            "--out",
            path(&ring)
        ])),
        0
    );
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&ring).unwrap()).unwrap();
    let flipped = if report["solution"][0] == 1 { 2 } else { 1 };
    report["solution"][0] = flipped.into();
    std::fs::write(&ring, report.to_string()).unwrap();
    assert_eq!(code(&unsplit(&["verify", path(&ring)])), 1);
}

#[test]
fn verify_rejects_bad_lambda_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    assert_eq!(
        code(&unsplit(&[
            "ssuf-round",
            path(&fixture("parallel.json")),
            "--out",
            path(&file)
        ])),
        0
    );
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    report["certificate"]["lambda"] = "3/2".into();
    std::fs::write(&file, report.to_string()).unwrap();
    assert_eq!(code(&unsplit(&["verify", path(&file)])), 2);
    std::fs::write(&file, "not json").unwrap();
    assert_eq!(code(&unsplit(&["verify", path(&file)])), 2);
}
