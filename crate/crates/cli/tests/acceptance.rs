//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture` and in any failure report). The same
//! checks back the `verify` command.

use poleplace_cli::checks::{self, Check};
use poleplace_cli::commands;

fn assert_check(check: Check) {
    let status = if check.pass { "PASS" } else { "FAIL" };
    println!("{status} {} {}", check.name, check.detail);
    assert!(check.pass, "{} failed: {}", check.name, check.detail);
}

#[test]
fn criterion_01_diophantine_residual() {
    assert_check(checks::criterion_diophantine_residual());
}

#[test]
fn criterion_02_charpoly_identity() {
    assert_check(checks::criterion_charpoly_identity());
}

#[test]
fn criterion_03_deadbeat_nilpotency() {
    assert_check(checks::criterion_deadbeat_nilpotency());
}

#[test]
fn criterion_04_prop1_pathwise() {
    assert_check(checks::criterion_prop1_pathwise());
}

#[test]
fn criterion_05_keyeq_consistency() {
    assert_check(checks::criterion_keyeq_consistency());
}

#[test]
fn criterion_06_envelope_certificate() {
    assert_check(checks::criterion_envelope());
}

#[test]
fn criterion_07_remark2_counterexample() {
    assert_check(checks::criterion_remark2());
}

#[test]
fn criterion_08_bounded_gain() {
    assert_check(checks::criterion_bounded_gain());
}

#[test]
fn criterion_09_time_varying_run() {
    assert_check(checks::criterion_time_varying_run());
}

#[test]
fn criterion_10_step_tracking() {
    assert_check(checks::criterion_step_tracking());
}

/// Criterion 11 at the artifact level: re-running a figure command
/// produces byte-identical files.
#[test]
fn criterion_11_determinism() {
    assert_check(checks::criterion_determinism());

    let base = std::env::temp_dir().join(format!("poleplace-acc-{}", std::process::id()));
    let dir1 = base.join("run1");
    let dir2 = base.join("run2");
    let paths1 = commands::cmd_figure("1a", &dir1).expect("figure 1a");
    let paths2 = commands::cmd_figure("1a", &dir2).expect("figure 1a again");
    assert_eq!(paths1.len(), 2);
    for (p1, p2) in paths1.iter().zip(paths2.iter()) {
        let b1 = std::fs::read(p1).unwrap();
        let b2 = std::fs::read(p2).unwrap();
        println!(
            "PASS determinism_files {} == {} ({} bytes)",
            p1.file_name().unwrap().to_string_lossy(),
            p2.file_name().unwrap().to_string_lossy(),
            b1.len()
        );
        assert_eq!(b1, b2, "artifacts differ between reruns");
    }
    std::fs::remove_dir_all(&base).ok();
}
