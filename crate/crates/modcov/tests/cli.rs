//! End-to-end tests of the command-line binary: exit codes, JSON shape and
//! printed output.

use std::process::{Command, Output};

fn modcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_writes_a_schema_stable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = modcov(&[
        "verify",
        "--case",
        "v3",
        "--p",
        "5",
        "--n",
        "3",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["verdict"], "verified");
    assert_eq!(doc["case"]["kind"], "v3");
    assert_eq!(doc["case"]["p"], 5);
    assert_eq!(doc["case"]["k"], 1);
    assert_eq!(doc["case"]["q"], 5);
    assert_eq!(doc["case"]["n"], 3);
    assert_eq!(doc["freetest"]["r"], 6);
    assert_eq!(doc["freetest"]["count"], 6);
    assert_eq!(doc["freetest"]["s"], 15);
    assert_eq!(doc["freetest"]["degree_sum"], 15);
    assert_eq!(doc["hsop"].as_array().unwrap().len(), 3);
    assert_eq!(doc["candidates"].as_array().unwrap().len(), 6);
    let per_degree = doc["per_degree"].as_array().unwrap();
    assert!(!per_degree.is_empty());
    for rec in per_degree {
        assert!(rec["ok"].as_bool().unwrap());
        assert!(rec.get("dim_Md").is_some());
        assert!(rec.get("dim_AplusMd").is_some());
        assert!(rec.get("n_cands").is_some());
    }
    assert!(doc.get("version").is_some());
    assert!(doc.get("elapsed_ms").is_some());
}

#[test]
fn verify_v3c4_without_p() {
    let out = modcov(&["verify", "--case", "v3c4", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("verified"));
}

#[test]
fn out_of_range_n_is_a_usage_error() {
    let out = modcov(&["verify", "--case", "v2v2", "--p", "3", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_p_is_a_usage_error() {
    let out = modcov(&["verify", "--case", "v2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = modcov(&["verify", "--case", "v2", "--n", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mutated_candidates_fail_with_exit_one() {
    for mutation in ["drop:0", "scale:2"] {
        let out = modcov(&[
            "verify", "--case", "v3", "--p", "3", "--n", "2", "--mutate", mutation,
        ]);
        assert_eq!(out.status.code(), Some(1), "mutation {mutation}");
        assert!(stdout(&out).contains("failed"));
    }
}

#[test]
fn kernel_prints_the_reduced_basis() {
    let out = modcov(&[
        "kernel", "--case", "v3", "--p", "3", "--n", "2", "--degree", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x2\nx3\n");
}

#[test]
fn series_prints_numerator_and_rank() {
    let out = modcov(&[
        "series",
        "--case",
        "v3",
        "--p",
        "3",
        "--n",
        "2",
        "--max-degree",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1 + t + t^2 + t^3"), "{text}");
    assert!(text.contains("r = 4, s = 6"), "{text}");
}

#[test]
fn series_closed_form_for_the_block_case() {
    let out = modcov(&["series", "--case", "v2v2", "--p", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("r = 4, s = 4"));
}

#[test]
fn suite_filter_runs_only_the_requested_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let out = modcov(&[
        "suite",
        "--max-p",
        "3",
        "--only",
        "lemmas",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["failed"], 0);
    for entry in doc["entries"].as_array().unwrap() {
        assert_eq!(entry["section"], "lemmas");
    }
}

#[test]
fn empty_suite_selection_is_a_usage_error() {
    let out = modcov(&["suite", "--max-p", "2", "--only", "lemmas"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma_reports_print_order_and_counts() {
    let out = modcov(&["lemmas", "--p", "5", "--lemma", "block-lead-terms"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("gradedlex"), "{text}");
    assert!(text.contains("105 entries"), "{text}");
}

#[test]
fn degree_cap_env_variable_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_modcov"))
        .args(["verify", "--case", "v3", "--p", "3", "--n", "2"])
        .env("MODCOV_MAX_DEGREE", "2")
        .output()
        .unwrap();
    // The series window no longer fits, so certification fails honestly.
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let out = Command::new(env!("CARGO_BIN_EXE_modcov"))
        .args(["verify", "--case", "v3", "--p", "3", "--n", "2"])
        .env("MODCOV_MAX_DEGREE", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
