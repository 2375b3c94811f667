//! End-to-end checks of the binary: exit codes, report schemas, fault
//! injection through an on-disk fixture directory, and output stability
//! across worker-pool sizes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gapcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapcert"))
        .args(args)
        .output()
        .expect("spawn gapcert")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Copy of the bundled fixture directory, editable per test.
fn copy_fixtures(dst: &Path) {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    fs::create_dir_all(dst.join("forms")).expect("mkdir");
    for name in ["curves.json", "regression.json"] {
        fs::copy(src.join(name), dst.join(name)).expect("copy fixture");
    }
    for entry in fs::read_dir(src.join("forms")).expect("read forms dir") {
        let entry = entry.expect("dir entry");
        fs::copy(entry.path(), dst.join("forms").join(entry.file_name())).expect("copy form");
    }
}

#[test]
fn sturm_prints_the_bound() {
    let out = gapcert(&["sturm", "--weight1", "2", "--weight2", "4", "--level", "24"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "sturm(2, 4, 24) = 128\n");
}

#[test]
fn congruent_pair_exits_zero() {
    let out = gapcert(&[
        "congr", "--form1", "f_24_2", "--form2", "f_24_4", "--bound", "19",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("congruent: true"));
}

#[test]
fn incongruent_pair_exits_one_and_names_the_index() {
    let out = gapcert(&[
        "congr", "--form1", "f_15_2", "--form2", "f_15_4", "--bound", "11",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("first failure: n = 2"));
}

#[test]
fn sturm_mode_congruence_needs_a_long_prefix() {
    let out = gapcert(&[
        "congr", "--form1", "f_24_2", "--form2", "f_24_4", "--check", "sturm",
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("trusted"));
}

#[test]
fn unknown_names_exit_two() {
    let out = gapcert(&["ap", "--curve", "nosuch"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown"));

    let out = gapcert(&["qexp", "--form", "nosuch"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_required_argument_exits_two() {
    // --c is required unless --estimate is given.
    let out = gapcert(&[
        "scan", "--level", "48", "--xmin", "10000", "--xmax", "20000",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn empty_ranges_exit_four() {
    let out = gapcert(&["gaps", "--curve", "24a3", "--nmin", "10", "--nmax", "5"]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));

    let out = gapcert(&[
        "scan", "--level", "48", "--xmin", "100", "--xmax", "10", "--c", "4",
    ]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn stored_form_past_its_bound_exits_three() {
    let out = gapcert(&["qexp", "--form", "f_15_2", "--bound", "50"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("trusted"));
}

#[test]
fn fixed_constant_scan_reports_failures_with_exit_one() {
    // c = 0 makes every interval empty, so every grid point fails.
    let out = gapcert(&[
        "scan", "--level", "48", "--xmin", "10000", "--xmax", "10000", "--c", "0",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("failures: 1"));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("sturm.json");
    let out = gapcert(&[
        "--format", "json",
        "--output", path.to_str().expect("utf-8 path"),
        "sturm", "--weight1", "2", "--weight2", "10", "--level", "24",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let body = fs::read_to_string(&path).expect("read report");
    let value: serde_json::Value = serde_json::from_str(&body).expect("valid JSON");
    assert_eq!(value["bound"], 320);
}

#[test]
fn csv_schemas_have_stable_headers() {
    let out = gapcert(&["--format", "csv", "ap", "--curve", "24a3", "--bound", "20"]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    assert!(body.starts_with("p,a_p,reduction\n"));
    assert!(body.contains("5,-2,good"));

    let out = gapcert(&["--format", "csv", "qexp", "--curve", "24a3", "--bound", "10"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("n,a_n\n"));

    let out = gapcert(&[
        "--format", "csv",
        "gaps", "--curve", "24a3", "--nmin", "1", "--nmax", "200",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("n,run_length,ratio,certified,coefficient_nonzero\n"));

    let out = gapcert(&[
        "--format", "csv",
        "scan", "--level", "48", "--xmin", "10000", "--xmax", "10100", "--c", "4",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("X,next_qualifying_n,gap,gap/X^(1/4)\n"));
}

#[test]
fn worker_pool_size_does_not_change_any_byte() {
    let runs: Vec<Output> = ["1", "2", "8"]
        .iter()
        .map(|jobs| {
            gapcert(&[
                "--format", "json", "--jobs", jobs,
                "scan", "--estimate", "--level", "48",
                "--xmin", "10000", "--xmax", "50000",
            ])
        })
        .collect();
    for out in &runs {
        assert_eq!(code(out), 0, "stderr: {}", stderr(out));
    }
    assert_eq!(runs[0].stdout, runs[1].stdout);
    assert_eq!(runs[1].stdout, runs[2].stdout);

    let runs: Vec<Output> = ["1", "4"]
        .iter()
        .map(|jobs| {
            gapcert(&[
                "--format", "json", "--jobs", jobs,
                "gaps", "--curve", "24a3", "--nmax", "2000", "--certify", "weight2",
            ])
        })
        .collect();
    for out in &runs {
        assert_eq!(code(out), 0, "stderr: {}", stderr(out));
    }
    assert_eq!(runs[0].stdout, runs[1].stdout);
}

#[test]
fn weight2_certificate_scan_is_clean() {
    let out = gapcert(&[
        "gaps", "--curve", "24a3", "--nmax", "3000", "--certify", "weight2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("certificate weight2: 0 violations"));
}

#[test]
fn et_family_lists_torsion_orders() {
    let out = gapcert(&["et-family", "--count", "5"]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    for t in 1..=5 {
        assert!(body.contains(&format!("t = {t}: order({{t, t}}) = 4")), "{body}");
    }
}

#[test]
fn fixture_directory_round_trips() {
    let dir = tempfile::tempdir().expect("tempdir");
    copy_fixtures(dir.path());
    let from_dir = gapcert(&[
        "--fixtures", dir.path().to_str().expect("utf-8 path"),
        "--format", "json",
        "qexp", "--form", "f_24_2",
    ]);
    let builtin = gapcert(&["--format", "json", "qexp", "--form", "f_24_2"]);
    assert_eq!(code(&from_dir), 0, "stderr: {}", stderr(&from_dir));
    assert_eq!(from_dir.stdout, builtin.stdout);
}

#[test]
fn missing_fixture_directory_exits_two() {
    let out = gapcert(&["--fixtures", "/nonexistent/fixtures", "sturm",
        "--weight1", "2", "--weight2", "4", "--level", "24"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("fixtures"));
}

#[test]
fn malformed_fixture_json_exits_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    copy_fixtures(dir.path());
    fs::write(dir.path().join("curves.json"), "[{\"label\": ").expect("truncate");
    let out = gapcert(&[
        "--fixtures", dir.path().to_str().expect("utf-8 path"),
        "ap", "--curve", "24a3",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn corrupted_stored_coefficient_is_caught_and_named() {
    let dir = tempfile::tempdir().expect("tempdir");
    copy_fixtures(dir.path());
    let path = dir.path().join("forms/f_24_2.json");
    let text = fs::read_to_string(&path).expect("read form");
    let corrupted = text.replace(
        r#""0", "1", "0", "-1", "0", "-2","#,
        r#""0", "1", "0", "-1", "0", "-3","#,
    );
    assert_ne!(text, corrupted, "corruption target not found");
    fs::write(&path, corrupted).expect("write corrupted form");

    let out = gapcert(&[
        "--fixtures", dir.path().to_str().expect("utf-8 path"),
        "verify-paper",
    ]);
    assert_eq!(code(&out), 1);
    let body = stdout(&out);
    assert!(body.contains("FAIL coefficient-reproduction"), "{body}");
    assert!(body.contains("a(5) computed -2 but stored -3"), "{body}");
    assert!(body.contains("failed:"), "{body}");
}
