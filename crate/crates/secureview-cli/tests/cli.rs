//! End-to-end tests of the `secureview` binary: file formats, exit codes
//! and the documented subcommand semantics.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secureview_core::harness::{isolate_module, three_gate_sample};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secureview"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn write_sample_workflow(dir: &Path) -> PathBuf {
    let wf = three_gate_sample();
    let path = dir.join("workflow.json");
    fs::write(&path, serde_json::to_string_pretty(wf.def()).unwrap()).unwrap();
    path
}

fn write_isolated_m1(dir: &Path) -> PathBuf {
    let wf = isolate_module(&three_gate_sample(), "m1").unwrap();
    let path = dir.join("m1.json");
    fs::write(&path, serde_json::to_string_pretty(wf.def()).unwrap()).unwrap();
    path
}

fn write_view(dir: &Path, name: &str, hidden: &[&str]) -> PathBuf {
    let path = dir.join(name);
    fs::write(
        &path,
        serde_json::to_string_pretty(&json!({"hidden_attributes": hidden})).unwrap(),
    )
    .unwrap();
    path
}

#[test]
fn validate_reports_order_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let wf = write_sample_workflow(dir.path());
    let out = run(&["validate", "--workflow", wf.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["valid"], json!(true));
    assert_eq!(v["order"], json!(["m1", "m2", "m3"]));

    // Duplicate producer: m3 also claims a6.
    let mut def = three_gate_sample().def().clone();
    def.modules[2].outputs = vec!["a6".into()];
    def.modules[2].behavior =
        secureview_core::model::Behavior::gates(&[("a6", "not(and(a4,a5))")]);
    let broken = dir.path().join("broken.json");
    fs::write(&broken, serde_json::to_string(&def).unwrap()).unwrap();
    let out = run(&["validate", "--workflow", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], json!(false));
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s.as_str().unwrap().contains("duplicate producer a6")));
}

#[test]
fn execute_prints_the_reference_relation() {
    let dir = tempfile::tempdir().unwrap();
    let wf = write_sample_workflow(dir.path());
    let out = run(&["execute", "--workflow", wf.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["rows"][0], json!(["0", "0", "0", "1", "1", "1", "0"]));
    assert_eq!(v["rows"][3], json!(["1", "1", "1", "0", "1", "1", "1"]));
}

#[test]
fn standalone_min_cost_pair_of_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let wf = write_sample_workflow(dir.path());
    let out = run(&[
        "standalone",
        "--workflow",
        wf.to_str().unwrap(),
        "--module",
        "m1",
        "--gamma",
        "4",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["min_cost"], json!({"num": 2, "den": 1}));
    assert_eq!(v["min_cost_hidden"].as_array().unwrap().len(), 2);
    assert!(v.get("safe_hidden_sets").is_none());

    let out = run(&[
        "standalone",
        "--workflow",
        wf.to_str().unwrap(),
        "--module",
        "m1",
        "--gamma",
        "4",
        "--all",
    ]);
    let v = stdout_json(&out);
    assert!(v["safe_hidden_sets"].as_array().unwrap().len() >= 4);
}

#[test]
fn check_safe_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = write_isolated_m1(dir.path());
    // Hiding both inputs leaves only three possible outputs: unsafe at
    // Γ = 4, exit 1.
    let unsafe_view = write_view(dir.path(), "unsafe.json", &["a1", "a2"]);
    let out = run(&[
        "check-safe",
        "--workflow",
        m1.to_str().unwrap(),
        "--view",
        unsafe_view.to_str().unwrap(),
        "--gamma",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], json!("unsafe"));
    assert_eq!(v["per_module"][0]["min_out_size"], json!(3));

    let safe_view = write_view(dir.path(), "safe.json", &["a2", "a4"]);
    let out = run(&[
        "check-safe",
        "--workflow",
        m1.to_str().unwrap(),
        "--view",
        safe_view.to_str().unwrap(),
        "--gamma",
        "4",
        "--mode",
        "compositional",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["verdict"], json!("safe-by-theorem"));
}

#[test]
fn worlds_count_and_budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = write_isolated_m1(dir.path());
    let view = write_view(dir.path(), "view.json", &["a2", "a4"]);
    let out = run(&[
        "worlds",
        "--workflow",
        m1.to_str().unwrap(),
        "--view",
        view.to_str().unwrap(),
        "--count",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["count"], json!(64));

    let out = run(&[
        "worlds",
        "--workflow",
        m1.to_str().unwrap(),
        "--view",
        view.to_str().unwrap(),
        "--count",
        "--budget",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fanout");
    let out = run(&[
        "gen",
        "--family",
        "example41",
        "--params",
        r#"{"n":8,"eps":{"num":1,"den":4}}"#,
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let wf = out_dir.join("workflow.json");
    let reqs = out_dir.join("requirements.json");
    let solution = dir.path().join("solution.json");
    let out = run(&[
        "solve",
        "--workflow",
        wf.to_str().unwrap(),
        "--method",
        "exact",
        "--reqs",
        reqs.to_str().unwrap(),
        "--out",
        solution.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["cost"], json!({"num": 9, "den": 4}));
    assert_eq!(v["feasible"], json!(true));

    let out = run(&[
        "verify",
        "--workflow",
        wf.to_str().unwrap(),
        "--reqs",
        reqs.to_str().unwrap(),
        "--solution",
        solution.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["feasible"], json!(true));
}

#[test]
fn requirements_subcommand_feeds_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let wf = write_sample_workflow(dir.path());
    let reqs = dir.path().join("reqs.json");
    let out = run(&[
        "requirements",
        "--workflow",
        wf.to_str().unwrap(),
        "--gammas",
        r#"{"m1":4,"m2":2,"m3":2}"#,
        "--form",
        "set",
        "--out",
        reqs.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "solve",
        "--workflow",
        wf.to_str().unwrap(),
        "--method",
        "exact",
        "--reqs",
        reqs.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["feasible"], json!(true));
}

#[test]
fn bench_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    fs::write(
        &suite,
        serde_json::to_string(&json!({
            "instances": [
                {"name": "fanout2", "family": "example41", "params": {"n": 2}},
                {"name": "fanout4", "family": "example41", "params": {"n": 4}}
            ],
            "methods": ["exact", "greedy", "card-round"],
            "seeds": [1, 2]
        }))
        .unwrap(),
    )
    .unwrap();
    let out = run(&["bench", "--suite", suite.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("instance,method,cost_num,cost_den,ratio,feasible,millis"));
    // exact + greedy once each per instance, card-round twice per instance.
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("greedy"));
}

#[test]
fn malformed_files_exit_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"attributes\": []").unwrap();
    let out = run(&["validate", "--workflow", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["worlds", "--workflow", bad.to_str().unwrap(), "--view", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
