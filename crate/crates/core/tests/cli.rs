//! End-to-end runs of the `volratio` binary.

use std::path::Path;
use std::process::Command;

use volratio::report::ExperimentReport;

fn run(args: &[&str], threads: &str, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_volratio"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("VOLRATIO_THREADS", threads)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

#[test]
fn vr_example_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vr.json");
    let code = run(&["vr", "--body-k", "b2:2", "--body-l", "b1:2", "--seed", "7", "--format", "json"], "1", &out);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let report = ExperimentReport::from_json(&text).unwrap();
    let vr = report.rows[0].value;
    assert!((vr - std::f64::consts::FRAC_PI_2.sqrt()).abs() < 0.0125 * vr, "{vr}");
    assert!(report.notes.iter().any(|n| n.contains("upper bounds")));
}

#[test]
fn bobkov_example_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let code = run(&["bobkov-check", "--body", "b1:4", "--samples", "10000", "--seed", "1"], "1", &out);
    assert_eq!(code, 0);
    let rows = ExperimentReport::read_csv_rows(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].flag, "ok");
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    for args in [
        &["vr", "--body-k", "b2:2", "--body-l", "b1:3"][..],
        &["vr", "--body-k", "nonsense:2", "--body-l", "b1:2"][..],
        &["vr", "--body-k", "{\"variant\": \"lp_ball\"}", "--body-l", "b1:2"][..],
        &["santalo", "--body", "b2:2", "--format", "xml"][..],
        &["no-such-command"][..],
    ] {
        assert_eq!(run(args, "1", &out), 1, "{args:?}");
    }
}

#[test]
fn row_count_is_trials_times_dims() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    assert_eq!(run(&["det-bound", "--dims", "2,3,4", "--trials", "7"], "1", &out), 0);
    let rows = ExperimentReport::read_csv_rows(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 21);
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["gluskin-lower", "--dims", "2,3", "--trials", "3", "--samples", "200", "--restarts", "1", "--seed", "11"];
    assert_eq!(run(&args, "1", &a), 0);
    assert_eq!(run(&args, "3", &b), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
