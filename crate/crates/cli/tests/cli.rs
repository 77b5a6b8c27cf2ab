use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ceerlab-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn ceerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceerlab")).current_dir(root()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_scenario(name: &str, out: &Path) -> Output {
    ceerlab(&["run", &format!("scenarios/{name}.toml"), "--out", out.to_str().unwrap()])
}

#[test]
fn dark_ring_run_reports_actions_and_is_reproducible() {
    let (a, b) = (scratch("dark-a.jsonl"), scratch("dark-b.jsonl"));
    let first = run_scenario("dark-ring-basic", &a);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stdout(&first).contains("D_0 acted at stage"), "{}", stdout(&first));
    assert!(run_scenario("dark-ring-basic", &b).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn invalid_epsilon_is_rejected() {
    let out = ceerlab(&["run", "scenarios/dark-ring-basic.toml", "--epsilon", "0", "--out", scratch("never.jsonl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--epsilon"), "{}", stderr(&out));
}

#[test]
fn star_log_passes_and_a_duplicate_left_side_fails() {
    let log = scratch("star.jsonl");
    assert!(run_scenario("star-universal-basic", &log).status.success());
    let ok = ceerlab(&["verify", log.to_str().unwrap(), "vi-vs-U"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).starts_with("PASS"));

    let text = fs::read_to_string(&log).unwrap();
    assert!(text.contains("\"x103 = 1\""));
    let bad = scratch("star-bad.jsonl");
    fs::write(&bad, text.replacen("\"x103 = 1\"", "\"x8 = x1\"", 1)).unwrap();
    let out = ceerlab(&["verify", bad.to_str().unwrap(), "triangularity"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("x8"), "{}", stdout(&out));
}

#[test]
fn empty_log_passes_with_a_warning() {
    let empty = scratch("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = ceerlab(&["verify", empty.to_str().unwrap(), "triangularity"]);
    assert!(out.status.success());
    assert!(format!("{}{}", stdout(&out), stderr(&out)).contains("vacuous"));
}

#[test]
fn unknown_suite_is_an_error() {
    let empty = scratch("suite.jsonl");
    fs::write(&empty, "").unwrap();
    let out = ceerlab(&["verify", empty.to_str().unwrap(), "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn probes_answer_from_dumps() {
    let related = ceerlab(&["probe", "fixtures/ceer_basic.jsonl", "related", "1", "2", "--stage", "3"]);
    assert_eq!(stdout(&related).trim(), "true");
    let early = ceerlab(&["probe", "fixtures/ceer_basic.jsonl", "related", "1", "2", "--stage", "2"]);
    assert_eq!(stdout(&early).trim(), "false");

    let classes = ceerlab(&["probe", "fixtures/identity.jsonl", "classes", "--bound", "10"]);
    let lines: Vec<String> = stdout(&classes).lines().map(str::to_owned).collect();
    assert_eq!(lines, (0..10).map(|n| format!("[{n}]")).collect::<Vec<_>>());

    let id = ceerlab(&["probe", "fixtures/ceer_basic.jsonl", "verify-reduction", "--map", "identity", "--bound", "16"]);
    assert!(id.status.success());
    assert_eq!(stdout(&id).trim(), "no violations");

    let collapse = ceerlab(&["probe", "fixtures/ceer_basic.jsonl", "verify-reduction", "--map", "const:0", "--bound", "16", "--target", "fixtures/identity.jsonl"]);
    assert!(collapse.status.success(), "{}", stdout(&collapse));
    assert!(!stdout(&collapse).contains("no violations"));

    let split = ceerlab(&["probe", "fixtures/ceer_basic.jsonl", "verify-reduction", "--map", "identity", "--bound", "10", "--target", "fixtures/identity.jsonl"]);
    assert_eq!(split.status.code(), Some(1), "{}", stdout(&split));
}
