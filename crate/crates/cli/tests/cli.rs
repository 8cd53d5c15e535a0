use std::fs;
use std::io::Cursor;
use std::path::PathBuf;
use std::process::Command;

use plausible_cli::{run, Output, DECIDED_NEGATIVE, DECIDED_POSITIVE, INPUT_ERROR};

fn cli(args: &[&str]) -> Output {
    run(
        std::iter::once("plausible").chain(args.iter().copied()),
        &mut std::io::empty(),
    )
}

fn cli_stdin(args: &[&str], input: &str) -> Output {
    let mut stdin = Cursor::new(input.as_bytes().to_vec());
    run(
        std::iter::once("plausible").chain(args.iter().copied()),
        &mut stdin,
    )
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

const FIXTURES: [&[&str]; 8] = [
    &["classical", "--n", "4"],
    &["triangle"],
    &["possibility"],
    &["kps"],
    &["kps-total"],
    &["modal", "--p", "3", "--d", "2"],
    &["measure", "--weights", "1/6,1/3,1/2"],
    &["random", "--seed", "9"],
];

#[test]
fn every_generated_fixture_validates() {
    for fixture in FIXTURES {
        let mut args = vec!["generate"];
        args.extend_from_slice(fixture);
        let generated = cli(&args);
        assert_eq!(generated.code, DECIDED_POSITIVE, "{fixture:?}");
        let validated = cli_stdin(&["validate", "--json", "-"], &generated.stdout);
        assert_eq!(
            validated.code, DECIDED_POSITIVE,
            "{fixture:?}: {}",
            validated.stderr
        );
        assert!(validated.stdout.contains("\"valid\": true"));
    }
}

#[test]
fn decisions_follow_the_exit_code_contract() {
    let possibility = cli(&["generate", "possibility"]).stdout;
    assert_eq!(
        cli_stdin(&["check", "-"], &possibility).code,
        DECIDED_NEGATIVE
    );
    assert_eq!(
        cli_stdin(&["almost-agree", "-"], &possibility).code,
        DECIDED_NEGATIVE
    );

    let measure = cli(&["generate", "measure", "--weights", "1/6,1/3,1/2"]).stdout;
    assert_eq!(cli_stdin(&["check", "-"], &measure).code, DECIDED_POSITIVE);
    let agree = cli_stdin(&["agree", "--json", "-"], &measure);
    assert_eq!(agree.code, DECIDED_POSITIVE);
    assert!(agree.stdout.contains("\"AGREES\""));
    let averaged = cli_stdin(&["agree", "--method", "averaged", "-"], &measure);
    assert_eq!(averaged.code, DECIDED_POSITIVE);

    let kps = cli(&["generate", "kps"]).stdout;
    let agree = cli_stdin(&["agree", "--json", "-"], &kps);
    assert_eq!(agree.code, DECIDED_NEGATIVE);
    assert!(agree.stdout.contains("\"NOT_TOTAL\""));
    assert_eq!(
        cli_stdin(&["almost-agree", "-"], &kps).code,
        DECIDED_POSITIVE
    );
}

#[test]
fn the_measure_fixture_recovers_its_weights() {
    let measure = cli(&["generate", "measure", "--weights", "1/6,1/3,1/2"]).stdout;
    let agree = cli_stdin(&["agree", "-"], &measure);
    assert!(agree.stdout.contains("μ(1) = 1/6"), "{}", agree.stdout);
    assert!(agree.stdout.contains("μ(3) = 1/2"));
}

#[test]
fn inconsistent_orders_are_a_negative_verdict() {
    let doc = r#"{
        "space": {"outcomes": ["a", "b"], "tests": [["a", "b"]]},
        "comparisons": [
            {"lhs": ["a"], "rhs": ["b"], "rel": "strict"},
            {"lhs": ["b"], "rhs": ["a"], "rel": "weak"}
        ]
    }"#;
    let out = cli_stdin(&["validate", "--json", "-"], doc);
    assert_eq!(out.code, DECIDED_NEGATIVE);
    assert!(out.stdout.contains("\"cycle\""));
    // Anywhere else the same document is simply bad input.
    assert_eq!(cli_stdin(&["check", "-"], doc).code, INPUT_ERROR);
}

#[test]
fn input_errors_exit_two_with_one_line() {
    let cases: [(&[&str], &str); 6] = [
        (&["check", "-"], "not json"),
        (&["check", "-"], r#"{"outcomes": ["a"], "tests": [["b"]]}"#),
        (
            &["check", "-"],
            r#"{"space": {"outcomes": ["a"], "tests": [["a"]]}, "comparisons": [{"lhs": ["z"], "rhs": [], "rel": "weak"}]}"#,
        ),
        (
            &["events", "--event-cap", "2", "-"],
            r#"{"outcomes": ["a", "b"], "tests": [["a", "b"]]}"#,
        ),
        (
            &["check", "--pair-cap", "1", "-"],
            r#"{"outcomes": ["a", "b"], "tests": [["a", "b"]]}"#,
        ),
        (&["frobnicate"], ""),
    ];
    for (args, input) in cases {
        let out = cli_stdin(args, input);
        assert_eq!(out.code, INPUT_ERROR, "{args:?} {input}");
        assert!(out.stdout.is_empty());
        assert_eq!(out.stderr.lines().count(), 1, "{}", out.stderr);
        assert!(out.stderr.starts_with("plausible: "));
    }
    assert_eq!(cli(&["check", "/no/such/file.json"]).code, INPUT_ERROR);
    assert_eq!(cli(&["generate", "modal", "--p", "4"]).code, INPUT_ERROR);
    assert_eq!(
        cli(&["generate", "measure", "--weights", "1/2,1/3"]).code,
        INPUT_ERROR
    );
    assert_eq!(
        cli(&["--threads", "0", "generate", "triangle"]).code,
        INPUT_ERROR
    );
    assert_eq!(cli(&["--help"]).code, DECIDED_POSITIVE);
}

#[test]
fn witness_rebuilds_stored_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let order = write(&dir, "kps.json", &cli(&["generate", "kps"]).stdout);
    let order = order.to_str().unwrap();
    let check = cli(&["check", "--json", order]);
    let report = write(&dir, "report.json", &check.stdout);
    let report = report.to_str().unwrap();

    let w = cli(&[
        "witness",
        "--json",
        order,
        "--certificate",
        report,
        "--index",
        "1",
    ]);
    assert_eq!(w.code, DECIDED_POSITIVE, "{}", w.stderr);
    assert!(w.stdout.contains("\"families\""));
    let human = cli(&["witness", order, "--certificate", report]);
    assert!(human.stdout.contains("lhs:"));

    assert_eq!(
        cli(&["witness", order, "--certificate", report, "--index", "999"]).code,
        INPUT_ERROR
    );
    let tampered = check
        .stdout
        .replacen("\"lambda\": \"1/2\"", "\"lambda\": \"2\"", 1);
    let tampered = write(&dir, "tampered.json", &tampered);
    let out = cli(&[
        "witness",
        order,
        "--certificate",
        tampered.to_str().unwrap(),
    ]);
    assert_eq!(out.code, INPUT_ERROR);
    assert!(out.stderr.contains("bad certificate"), "{}", out.stderr);
}

#[test]
fn oracle_flag_cross_checks() {
    let possibility = cli(&["generate", "possibility"]).stdout;
    let out = cli_stdin(&["check", "--json", "--oracle", "-"], &possibility);
    assert_eq!(out.code, DECIDED_NEGATIVE);
    assert!(out.stdout.contains("\"oracle\""));
    let report = cli_stdin(&["oracle", "--json", "-"], &possibility);
    assert_eq!(report.code, DECIDED_POSITIVE);
    assert!(report.stdout.contains("\"agree\": true"));
    assert_eq!(
        cli_stdin(&["oracle", "--max-length", "0", "-"], &possibility).code,
        INPUT_ERROR
    );
}

#[test]
fn scope_flag_overrides_the_document() {
    let triangle = cli(&["generate", "triangle"]).stdout;
    let active = cli_stdin(&["validate", "--json", "-"], &triangle);
    let full = cli_stdin(&["validate", "--json", "--scope", "full", "-"], &triangle);
    assert!(active.stdout.contains("\"scope_size\": 7"));
    assert!(full.stdout.contains("\"scope\": \"full\""));
}

#[test]
fn binary_writes_reports_to_stdout() {
    let out = Command::new(env!("CARGO_BIN_EXE_plausible"))
        .args(["generate", "kps"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("\"strict\""));

    let out = Command::new(env!("CARGO_BIN_EXE_plausible"))
        .args(["check", "missing.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}
