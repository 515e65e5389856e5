use std::process::{Command, Output};

use darboux_core::analysis::report::{parse_report_lines, Outcome};

const GOLDEN: &str = include_str!("../../core/tests/data/table_a_blocks.txt");

fn darboux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn analyze_exit_codes() {
    assert_eq!(code(&darboux(&["analyze", "-i", "-1/q1", "--darboux", "(-1)"])), 0);
    assert_eq!(code(&darboux(&["analyze", "-i", "-1/q1 + q2^3/q1^4", "--darboux", "(-1, 0)"])), 2);
    assert_eq!(code(&darboux(&["analyze", "-i", "1/q1^2", "--darboux", "(1)"])), 1);
    assert_eq!(code(&darboux(&["analyze", "-i", "-1/q1"])), 1);
    assert_eq!(code(&darboux(&["analyze", "-i", "-1/q1", "--darboux", "(-1)", "--darboux", "(0)"])), 1);
    assert_eq!(code(&darboux(&["--bogus"])), 1);
    assert_eq!(code(&darboux(&["--help"])), 0);
}

#[test]
fn text_report_mentions_the_verdicts() {
    let o = darboux(&["analyze", "-i", "-1/q1 + q2^2/(2*q1^3) + q2^3/q1^4", "--darboux", "(-1, 0)"]);
    let text = stdout(&o);
    assert!(text.contains("outcome: pass"), "{text}");
    assert!(text.contains("C2"), "{text}");
}

#[test]
fn input_document_from_file() {
    let dir = std::env::temp_dir().join(format!("darboux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c2.txt");
    std::fs::write(
        &path,
        "# C2 example\npotential: -1/q1 + q2^2/(2*q1^3) + q2^3/q1^4\ndarboux: (-1, 0)\ndarboux: (2, 0)\n",
    )
    .unwrap();
    let o = darboux(&["--format", "structured", "analyze", "-i", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let reports = parse_report_lines(&stdout(&o)).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r.outcome == Outcome::Pass));

    std::fs::write(&path, "potential: -1/q1\nshape: round\n").unwrap();
    assert_eq!(code(&darboux(&["analyze", "-i", path.to_str().unwrap()])), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn structured_output_round_trips() {
    let o = darboux(&[
        "--format",
        "structured",
        "analyze",
        "-i",
        "-1/q1 + q2^3/q1^4",
        "--darboux",
        "(-1, 0)",
        "--darboux",
        "(3, 0)",
        "--darboux",
        "(1, 1)",
        "--timings",
    ]);
    let text = stdout(&o);
    let reports = parse_report_lines(&text).unwrap();
    let outcomes: Vec<Outcome> = reports.iter().map(|r| r.outcome).collect();
    assert_eq!(outcomes, vec![Outcome::Fail, Outcome::Fail, Outcome::InputError]);
    assert!(reports[0].timings.is_some());
    let again: String = reports.iter().map(|r| r.to_json() + "\n").collect();
    assert_eq!(again, text);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = |jobs: &'static str| {
        vec![
            "--jobs",
            jobs,
            "--format",
            "structured",
            "analyze",
            "-i",
            "-1/q1 + q2^2/(2*q1^3) + q3^3/q1^4",
            "--darboux",
            "(-1, 0, 0)",
            "--darboux",
            "(2, 0, 0)",
            "--darboux",
            "(-1/2, 0, 0)",
        ]
    };
    assert_eq!(stdout(&darboux(&args("1"))), stdout(&darboux(&args("4"))));
    let table = |jobs| stdout(&darboux(&["--jobs", jobs, "table", "--range", "6"]));
    assert_eq!(table("1"), table("4"));
    assert_eq!(code(&darboux(&["--jobs", "0", "table"])), 1);
}

#[test]
fn table_exports() {
    assert_eq!(stdout(&darboux(&["table", "--range", "0"])), "0 0 0 1\n");
    assert_eq!(stdout(&darboux(&["table", "--range", "2"])).lines().count(), 10);
    assert_eq!(stdout(&darboux(&["table", "--blocks"])).trim_end(), GOLDEN.trim_end());
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&darboux(&["--format", "structured", "table", "--range", "3"]))).unwrap();
    assert_eq!(json["max_index"], 3);
    assert_eq!(json["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn residue_output() {
    let text = stdout(&darboux(&["residue", "1", "1", "1"]));
    assert!(text.starts_with("S(1,1,1)\n"));
    assert!(text.contains("c2 = 8/5"));
    assert!(text.contains("closed form c2 = 8/5 (matches)"));
    let text = stdout(&darboux(&["residue", "1", "1", "4"]));
    assert!(text.contains("c1 = -64/15"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&darboux(&["--format", "structured", "residue", "2", "2", "2"]))).unwrap();
    assert_eq!(json["residues"]["coefficients"], serde_json::json!(["0", "0", "0", "0"]));
    assert!(code(&darboux(&["residue", "0", "1", "1"])) == 0);
}

#[test]
fn selfcheck_passes_and_detects_perturbation() {
    let o = darboux(&["selfcheck", "--range", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
    let o = darboux(&["selfcheck", "--range", "4", "--perturb-p", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("FAIL ode"));
}
