//! End-to-end tests of the `iofair` binary: exit codes, report
//! formats, and the promise that everything it emits re-parses and
//! re-verifies.

use serde_json::{json, Value};
use std::path::Path;
use std::process::Command;

const CHATTY: &str = "automaton chatty\n  kind io\n  outputs c\n  states s0 s1\n  start s0\n  \
                      task t_c = c\n  trans s0 c s1\nend\n";
const HUSH: &str = "automaton hush\n  kind io\n  outputs c\n  states s0\n  start s0\n  \
                    task t_c = c\nend\n";

fn run(args: &[&str]) -> (i32, String, String) {
    run_in(args, &[])
}

fn run_in(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iofair"));
    cmd.args(args).env_remove("IOFAIR_LASSO_BOUND");
    for (key, value) in env {
        cmd.env(key, value);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("temp file writes");
    path.to_str().expect("utf-8 path").to_string()
}

#[test]
fn fair_preorder_on_the_silent_pair_holds_both_ways() {
    for (a, b) in [("SEC6_A", "SEC6_B"), ("SEC6_B", "SEC6_A")] {
        let (code, stdout, _) = run(&["preorder", "fair", a, b]);
        assert_eq!(code, 0, "{a} vs {b}: {stdout}");
        assert!(stdout.contains("holds (exact)"));
    }
}

#[test]
fn figure_pair_splits_under_must_pr_with_the_lts_regime() {
    let (code, stdout, _) =
        run(&["check", "must-pr", "--system", "FIG1_B", "--test", "FIG1_T", "--regime", "lts"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("does not hold"));
    assert!(stdout.contains("witness:"));

    let (code, stdout, _) =
        run(&["check", "must-pr", "--system", "FIG1_A", "--test", "FIG1_T", "--regime", "lts"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("holds"));
}

#[test]
fn inadmissible_test_exits_two_and_names_the_clause() {
    let (code, _, stderr) = run(&[
        "check",
        "must-pr",
        "--system",
        "FIG1_A",
        "--test",
        "FIG1_T_IO",
        "--regime",
        "strongly-compatible",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("strongly-compatible"), "{stderr}");
    assert!(stderr.contains("output action"), "{stderr}");
}

#[test]
fn golden_json_report_for_the_figure_check() {
    let (code, stdout, _) = run(&[
        "check",
        "must-pr",
        "--system",
        "FIG1_B",
        "--test",
        "FIG1_T",
        "--regime",
        "lts",
        "--json",
    ]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).expect("stdout is JSON");
    let expected = json!({
        "schema": "iofair-report/1",
        "command": "check",
        "verdict": "must-pr",
        "system": "FIG1_B",
        "test": "FIG1_T",
        "regime": "lts",
        "admissible": true,
        "violations": [],
        "holds": false,
        "completeness": "exact",
        "witness": {
            "kind": "finite",
            "states": ["t0.q0", "t0.q1"],
            "actions": ["tau"],
        },
    });
    assert_eq!(report, expected);
}

#[test]
fn json_and_text_reports_carry_the_same_verdict_data() {
    let args = ["preorder", "quiescent", "SEC6_A", "SEC6_B"];
    let (text_code, text, _) = run(&args);
    let (json_code, raw, _) = run(&[&args[..], &["--json"]].concat());
    assert_eq!(text_code, json_code);
    let report: Value = serde_json::from_str(&raw).expect("stdout is JSON");
    assert_eq!(report["holds"], json!(true));
    assert!(text.contains("holds"));
    // The divergence caveat shows up in both renderings.
    assert!(report["flags"].as_array().is_some_and(|f| !f.is_empty()));
    assert!(text.contains("note:"));
}

#[test]
fn may_witness_round_trips_through_check() {
    let dir = tempfile::tempdir().expect("tempdir");
    let chatty = write(dir.path(), "chatty.dsl", CHATTY);
    let hush = write(dir.path(), "hush.dsl", HUSH);

    let (code, stdout, _) = run(&["witness", "may", &chatty, &hush]);
    assert_eq!(code, 1);
    iofair::dsl::parse_single(&stdout).expect("emitted witness re-parses");
    let wt = write(dir.path(), "wt.dsl", &stdout);

    let (accepts, _, _) = run(&["check", "may", "--system", &chatty, "--test", &wt]);
    assert_eq!(accepts, 0);
    let (rejects, _, _) = run(&["check", "may", "--system", &hush, "--test", &wt]);
    assert_eq!(rejects, 1);
}

#[test]
fn fair_must_witness_round_trips_through_check() {
    let dir = tempfile::tempdir().expect("tempdir");
    let chatty = write(dir.path(), "chatty.dsl", CHATTY);
    let hush = write(dir.path(), "hush.dsl", HUSH);

    // hush keeps the empty fair trace that chatty lacks, so the pair is
    // distinguished in this direction too.
    let (code, stdout, _) = run(&["witness", "fair-must", &chatty, &hush]);
    assert_eq!(code, 1);
    iofair::dsl::parse_single(&stdout).expect("emitted witness re-parses");
    let wt = write(dir.path(), "wt.dsl", &stdout);

    let (accepts, _, _) = run(&["check", "must-f", "--system", &chatty, "--test", &wt]);
    assert_eq!(accepts, 0);
    let (rejects, _, _) = run(&["check", "must-f", "--system", &hush, "--test", &wt]);
    assert_eq!(rejects, 1);
}

#[test]
fn witness_prints_none_for_an_undistinguished_pair() {
    let (code, stdout, _) = run(&["witness", "may", "FIG1_A", "FIG1_B"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "none");
}

#[test]
fn compose_output_reparses() {
    let (code, stdout, _) = run(&["compose", "FIG1_T", "FIG1_A"]);
    assert_eq!(code, 0);
    let (name, auto) = iofair::dsl::parse_single(&stdout).expect("product re-parses");
    assert_eq!(name, "FIG1_T_FIG1_A");
    assert!(!auto.states().is_empty());

    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("product.dsl");
    let out_arg = out.to_str().expect("utf-8 path");
    let (code, stdout, _) = run(&["compose", "FIG1_T", "FIG1_A", "-o", out_arg]);
    assert_eq!(code, 0);
    assert!(stdout.contains("wrote"));
    let text = std::fs::read_to_string(&out).expect("output file exists");
    iofair::dsl::parse_single(&text).expect("written product re-parses");
}

#[test]
fn compose_rejects_incompatible_components() {
    // Both fixtures own the outputs a and b, so the task-preserving
    // composition refuses the pair.
    let (code, _, stderr) = run(&["compose", "FIG1_A", "FIG1_B"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn validate_reports_line_positions_for_bad_input() {
    let dir = tempfile::tempdir().expect("tempdir");
    let good = write(dir.path(), "good.dsl", CHATTY);
    let bad = write(
        dir.path(),
        "bad.dsl",
        "automaton broken\n  kind io\n  outputs c\n  states s0\n  start s0\n  task t_c = c\n  \
         trans s0 oops s0\nend\n",
    );

    let (code, stdout, _) = run(&["validate", &good]);
    assert_eq!(code, 0);
    assert!(stdout.contains("chatty ok"));

    let (code, stdout, _) = run(&["validate", &bad]);
    assert_eq!(code, 2);
    assert!(stdout.contains("line 7"), "{stdout}");
}

#[test]
fn lasso_bound_flag_and_environment_override() {
    let (code, stdout, _) =
        run(&["preorder", "fair", "SEC6_A", "SEC6_B", "--mode", "bounded", "--lasso-bound", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("bounded(3)"), "{stdout}");

    let (code, stdout, _) = run_in(
        &["preorder", "fair", "SEC6_A", "SEC6_B", "--mode", "bounded"],
        &[("IOFAIR_LASSO_BOUND", "4")],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("bounded(4)"), "{stdout}");

    let (code, _, stderr) = run_in(
        &["preorder", "fair", "SEC6_A", "SEC6_B"],
        &[("IOFAIR_LASSO_BOUND", "many")],
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("IOFAIR_LASSO_BOUND"), "{stderr}");
}

#[test]
fn preorder_must_f_attaches_the_witness_test_in_json() {
    let dir = tempfile::tempdir().expect("tempdir");
    let chatty = write(dir.path(), "chatty.dsl", CHATTY);
    let hush = write(dir.path(), "hush.dsl", HUSH);
    let (code, stdout, _) = run(&["preorder", "must-f", &chatty, &hush, "--json"]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).expect("stdout is JSON");
    assert_eq!(report["holds"], json!(false));
    assert_eq!(report["counterexample"]["kind"], json!("finite"));
    let text = report["witness_test"].as_str().expect("witness test attached");
    iofair::dsl::parse_single(text).expect("attached witness re-parses");
}

#[test]
fn harness_runs_fixture_and_random_suites() {
    let (code, stdout, _) = run(&["harness", "fig1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("pass"));

    let (code, stdout, _) =
        run(&["harness", "eq_1_2", "--trials", "3", "--seed", "7", "--json"]);
    assert_eq!(code, 0, "{stdout}");
    let report: Value = serde_json::from_str(&stdout).expect("stdout is JSON");
    assert_eq!(report["schema"], json!("iofair-report/1"));
    assert_eq!(report["suite"], json!("eq_1_2"));
    assert_eq!(report["trials"], json!(3));
    assert_eq!(report["passed"], json!(true));

    let (code, _, stderr) = run(&["harness", "bogus"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("thm5_1"), "{stderr}");
}

#[test]
fn missing_file_is_a_usage_error() {
    let (code, _, stderr) =
        run(&["check", "may", "--system", "nosuch.dsl", "--test", "FIG1_T"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"));
}
