use std::path::{Path, PathBuf};
use std::process::Command as Process;

use fatlab::invariants::Exact;
use fatlab::verifier::{Aggregate, CorpusSelector, SuiteId, SuiteSpec, SuiteVerdict};
use fatlab_cli::report::{self, Format, ReportBody, ReportDocument};
use fatlab_cli::{run_command, Command, RunConfig, SpecSource, EXIT_COUNTEREXAMPLE, EXIT_ERROR, EXIT_OK};
use tempfile::TempDir;

fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn star4(dir: &Path) -> PathBuf {
    write_spec(dir, "star4.scheme", "field: prime 2147483647\nN: 2\nstar: {s: 4, seed: 7}\n")
}

fn gen5(dir: &Path) -> PathBuf {
    write_spec(dir, "gen5.scheme", "field: prime 2147483647\nN: 2\ngeneral: {n: 5, seed: 11}\n")
}

fn config(command: Command, spec: &Path) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.spec = Some(SpecSource::File { path: spec.to_path_buf() });
    c
}

fn body_json(doc: &ReportDocument) -> String {
    serde_json::to_string(&doc.body).unwrap()
}

#[test]
fn gamma_of_four_line_star_reaches_two() {
    let dir = TempDir::new().unwrap();
    let mut c = config(Command::Gamma, &star4(dir.path()));
    c.m_max = Some(4);
    let doc = run_command(&c);
    assert_eq!(doc.exit_status, EXIT_OK);
    let ReportBody::Invariants { rows, .. } = &doc.body else { panic!("{:?}", doc.body) };
    let alphas: Vec<_> = rows.iter().map(|r| r.alpha.unwrap()).collect();
    assert_eq!(alphas, [3, 4, 7, 8]);
    let last = rows.last().unwrap().gamma.as_ref().unwrap();
    assert_eq!(last.upper, Exact::new(2, 1));
    assert_eq!(last.lower, Exact::new(7, 4));
}

#[test]
fn five_general_points_satisfy_the_shifted_containment() {
    let dir = TempDir::new().unwrap();
    let doc = run_command(&config(Command::Contains { m: 4, j: 2, r: 2 }, &gen5(dir.path())));
    assert_eq!(doc.exit_status, EXIT_OK);
    let ReportBody::Containment { result, .. } = &doc.body else { panic!("{:?}", doc.body) };
    assert!(result.report.holds);
    assert!(result.report.witness.is_none());
}

#[test]
fn failed_containment_reports_a_verified_witness() {
    let mut c = RunConfig::new(Command::Contains { m: 2, j: 2, r: 1 });
    c.spec = Some(SpecSource::MControl);
    let doc = run_command(&c);
    assert_eq!(doc.exit_status, EXIT_OK);
    let ReportBody::Containment { result, .. } = &doc.body else { panic!("{:?}", doc.body) };
    assert!(!result.report.holds);
    assert_eq!(result.witness_verified, Some(true));
}

#[test]
fn invariant_commands_agree_with_known_values() {
    let dir = TempDir::new().unwrap();
    let spec = star4(dir.path());
    let rows = |cmd| match run_command(&config(cmd, &spec)).body {
        ReportBody::Invariants { rows, .. } => rows,
        other => panic!("{other:?}"),
    };
    let reg: Vec<_> = rows(Command::Regularity).iter().map(|r| r.regularity.unwrap()).collect();
    assert_eq!(reg[0], 3);
    let beta: Vec<_> = rows(Command::Beta).iter().map(|r| r.beta.unwrap()).collect();
    assert_eq!(beta, [3, 6, 9]);
    let hilbert = rows(Command::Hilbert);
    assert_eq!(hilbert[0].hilbert, [1, 3, 6, 6]);
    assert_eq!(*hilbert[1].hilbert.last().unwrap(), 18);
}

#[test]
fn m_control_exercises_the_counterexample_exit() {
    let mut c = RunConfig::new(Command::Suite { id: SuiteId::ConjMain });
    c.spec = Some(SpecSource::MControl);
    let doc = run_command(&c);
    assert_eq!(doc.exit_status, EXIT_COUNTEREXAMPLE);
    let ReportBody::Suite { verdict, .. } = &doc.body else { panic!("{:?}", doc.body) };
    assert_eq!(verdict.aggregate, Aggregate::Counterexamples);
    assert_eq!(verdict.cases.len(), 2);
}

#[test]
fn m_control_is_rejected_outside_conj_main() {
    let mut c = RunConfig::new(Command::Suite { id: SuiteId::P2 });
    c.spec = Some(SpecSource::MControl);
    assert_eq!(run_command(&c).exit_status, EXIT_ERROR);
}

#[test]
fn single_scheme_suite_passes() {
    let dir = TempDir::new().unwrap();
    let doc = run_command(&config(Command::Suite { id: SuiteId::Evoessen }, &gen5(dir.path())));
    assert_eq!(doc.exit_status, EXIT_OK, "{}", body_json(&doc));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let mut c = config(Command::Gamma, &gen5(dir.path()));
    c.m_max = Some(4);
    let a = run_command(&c);
    let b = run_command(&c);
    assert_eq!(body_json(&a), body_json(&b));
    let mut pinned = a.clone();
    pinned.header.generated_at = b.header.generated_at.clone();
    assert_eq!(report::emit(&pinned, Format::Json).unwrap(), report::emit(&b, Format::Json).unwrap());
}

#[test]
fn warm_cache_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let mut c = config(Command::Suite { id: SuiteId::ConjMain }, &gen5(dir.path()));
    c.cache_dir = Some(cache.clone());
    let cold = run_command(&c);
    assert!(std::fs::read_dir(&cache).unwrap().next().is_some(), "cache stayed empty");
    let warm = run_command(&c);
    assert_eq!(cold.exit_status, EXIT_OK);
    assert_eq!(body_json(&cold), body_json(&warm));
}

#[test]
fn csv_has_one_row_per_power() {
    let dir = TempDir::new().unwrap();
    let mut c = config(Command::Alpha, &gen5(dir.path()));
    c.format = Format::Csv;
    c.m_max = Some(6);
    let text = String::from_utf8(report::emit(&run_command(&c), Format::Csv).unwrap()).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("scheme_id,m,alpha,beta,"));
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[6], "general-N2-n5-seed11,6,12,,,,,,,");
}

#[test]
fn empty_suite_is_a_valid_document() {
    let mut spec = SuiteSpec::new(SuiteId::P2);
    spec.corpus = CorpusSelector::Entries { entries: Vec::new() };
    let verdict = SuiteVerdict::from_cases(SuiteId::P2, "GF(2147483647)".into(), Vec::new());
    let doc = ReportDocument {
        header: report::ReportHeader::new(&RunConfig::new(Command::Suite { id: SuiteId::P2 }), verdict.field.clone(), vec![]),
        exit_status: verdict.exit_code(),
        body: ReportBody::Suite { spec: Box::new(spec), verdict },
    };
    assert_eq!(doc.exit_status, EXIT_OK);
    let bytes = report::emit(&doc, Format::Json).unwrap();
    let back: ReportDocument = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(back, doc);
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "bad.scheme", "field: prime 2147483647\nN: 2\nstar: {s: 4, sed: 7}\n");
    let doc = run_command(&config(Command::Alpha, &spec));
    assert_eq!(doc.exit_status, EXIT_ERROR);
    let ReportBody::Error { message } = &doc.body else { panic!("{:?}", doc.body) };
    assert!(message.contains("line 3"), "{message}");
}

#[test]
fn duplicate_points_name_the_point() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        dir.path(),
        "dup.scheme",
        "field: rationals\nN: 2\npoints:\n  - [1,0,0] x 1\n  - [2,0,0] x 2\n",
    );
    let doc = run_command(&config(Command::Alpha, &spec));
    let ReportBody::Error { message } = &doc.body else { panic!("{:?}", doc.body) };
    assert!(message.contains("[1:0:0]") || message.contains("[1,0,0]"), "{message}");
}

#[test]
fn field_override_switches_backend() {
    let dir = TempDir::new().unwrap();
    let mut c = config(Command::Alpha, &star4(dir.path()));
    c.field = Some(fatlab::scalar::FieldConfig::Rationals);
    let doc = run_command(&c);
    assert_eq!(doc.header.field, "QQ");
    let prime = run_command(&config(Command::Alpha, &star4(dir.path())));
    assert_eq!(body_json(&doc), body_json(&prime));
}

fn binary() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_fatlab"));
    p.env("SOURCE_DATE_EPOCH", "0").env_remove("FATLAB_CACHE_DIR");
    p
}

#[test]
fn binary_exit_codes_and_pinned_output() {
    let dir = TempDir::new().unwrap();
    let spec = star4(dir.path());
    let run = |args: &[&str]| binary().args(args).output().unwrap();

    let a = run(&["gamma", "--spec", spec.to_str().unwrap(), "--m-max", "3"]);
    let b = run(&["gamma", "--spec", spec.to_str().unwrap(), "--m-max", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("1970-01-01T00:00:00Z"));

    let control = run(&["suite", "conj-main", "--spec", "M-control", "--format", "csv"]);
    assert_eq!(control.status.code(), Some(1));

    let missing = run(&["alpha", "--spec", dir.path().join("absent").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());

    let bad_field = run(&["alpha", "--spec", spec.to_str().unwrap(), "--field", "prime:100"]);
    assert_eq!(bad_field.status.code(), Some(2));

    let out = dir.path().join("report.csv");
    let written = run(&["regularity", "--spec", spec.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("star-N2-s4-seed7,1,,,3,"));
}
