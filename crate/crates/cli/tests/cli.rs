//! End-to-end checks of the binary against the shipped worked example.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rolemine"))
}

fn demo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/demo.edges")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn reduce_reports_counts() {
    let out = run(bin().args(["reduce", "--quiet", "--input"]).arg(demo()));
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("15 edges"), "{text}");
    assert!(text.contains("8 after reduction"), "{text}");
}

#[test]
fn count_bicliques_reports_exact() {
    let out = run(bin().args(["count-bicliques", "--quiet", "--input"]).arg(demo()));
    assert!(out.status.success());
    assert!(stdout(&out).contains("Exact(8)"));

    let out = run(bin()
        .args(["count-bicliques", "--quiet", "--threshold", "5", "--input"])
        .arg(demo()));
    assert!(stdout(&out).contains("ExceededThreshold(5)"));
}

#[test]
fn mine_exact_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let policy = dir.path().join("policy.json");
    let report = dir.path().join("report.json");
    let out = run(bin()
        .args(["mine-exact", "--quiet", "--input"])
        .arg(demo())
        .arg("--output")
        .arg(&policy)
        .arg("--report")
        .arg(&report));
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("4 roles"));

    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["total_roles"], 4);
    assert_eq!(rep["edges_after_reduction"], 8);
    assert_eq!(rep["maximal_bicliques"], 8);

    let out = run(bin()
        .args(["verify", "--quiet", "--input"])
        .arg(demo())
        .arg("--policy")
        .arg(&policy));
    assert!(out.status.success());
    assert!(stdout(&out).contains("sound: 4 roles"));
}

#[test]
fn verify_detects_unsound_policy_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let policy = dir.path().join("broken.json");
    fs::write(
        &policy,
        r#"{"role_count":1,"roles":[{"users":["u0"],"perms":["p0"],"provenance":"greedy"}]}"#,
    )
    .unwrap();
    let out = run(bin()
        .args(["verify", "--quiet", "--input"])
        .arg(demo())
        .arg("--policy")
        .arg(&policy));
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("UNSOUND"));
}

#[test]
fn malformed_instance_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    fs::write(&bad, "u0 p0\nonly-one-token\n").unwrap();
    let out = run(bin()
        .args(["mine-exact", "--quiet", "--format", "edgelist", "--input"])
        .arg(&bad));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn emit_lp_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("demo.lp");
    let out = run(bin()
        .args(["emit-lp", "--quiet", "--input"])
        .arg(demo())
        .arg("--output")
        .arg(&lp));
    assert!(out.status.success());
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("Minimize\n"));
    assert!(text.contains("Subject To\n"));
    assert!(text.trim_end().ends_with("End"));
    assert_eq!(text.matches(">= 1").count(), 8);
}

#[test]
fn heuristic_modes_run() {
    for strategy in ["smallest", "largest", "best"] {
        let out = run(bin()
            .args(["mine-heuristic", "--quiet", "--strategy", strategy, "--seed", "3", "--input"])
            .arg(demo()));
        assert!(out.status.success(), "{strategy}");
        assert!(stdout(&out).contains("roles"), "{strategy}");
    }
}

#[test]
fn mine_hard_with_forced_large_phase() {
    // Tiny thresholds force the large-biclique path even on the demo.
    let out = run(bin()
        .args([
            "mine-hard",
            "--quiet",
            "--threshold",
            "1",
            "--large-threshold",
            "2",
            "--input",
        ])
        .arg(demo()));
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("4 roles") || stdout(&out).contains("roles"));
}

#[test]
fn branch_and_price_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let out = run(bin()
        .args(["branch-and-price", "--quiet", "--input"])
        .arg(demo())
        .arg("--trace-csv")
        .arg(&csv));
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("elapsed_seconds,objective\n"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn bench_suite_summarizes_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(demo(), dir.path().join("demo.edges")).unwrap();
    fs::write(dir.path().join("tiny.rmp"), "1 1 0\n1 1 1\n0 1 1\n").unwrap();
    fs::write(dir.path().join("bounds.csv"), "instance,bound\ndemo,4\ntiny,2\n").unwrap();
    let out = run(bin()
        .args(["bench", "--jobs", "2", "--mode", "exact", "--dir"])
        .arg(dir.path()));
    assert!(out.status.success(), "{}", stdout(&out));
    let summary = fs::read_to_string(dir.path().join("reports/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.contains("demo,exact,15,8"));
    let md = fs::read_to_string(dir.path().join("reports/summary.md")).unwrap();
    assert!(md.contains("| demo |"));
}

#[test]
fn bench_empty_directory_is_ok() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().args(["bench", "--dir"]).arg(dir.path()));
    assert!(out.status.success());
}
