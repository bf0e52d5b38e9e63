mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture_path;

fn pomset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pomset")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> String {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn equiv_exit_codes() {
    let o = pomset(&["equiv", "a.(b||c).a", "a.(c||b).a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "equivalent");
    let o = pomset(&["equiv", "a*", "a.a*"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not equivalent"));
}

#[test]
fn equiv_with_oracle_reports_a_witness() {
    let o = pomset(&["--json", "equiv", "a||b", "a.b", "--oracle", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "equiv");
    assert_eq!(v["result"], false);
    assert_eq!(v["details"]["oracle_equivalent"], false);
}

#[test]
fn member_on_fixture() {
    let o = pomset(&["member", "--pa", &fx("fork_join"), "--state", "q0", "a.(b||c).a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "member");
    let o = pomset(&["member", "--expr", "a*", "a.b"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports_structure() {
    let o = pomset(&["check", &fx("run_confusion")]);
    let out = stdout(&o);
    assert!(out.contains("well_structured: false"));
    assert!(out.contains("parsimonious: false"));
    let o = pomset(&["check", &fx("fork_cycle")]);
    assert!(stdout(&o).contains("fork_acyclic: false"));
}

#[test]
fn normalize_output_is_well_structured() {
    for name in ["run_confusion", "fork_associativity", "nullary_forks", "unary_forks"] {
        let out = scratch(&format!("{name}.normal.json"));
        let o = pomset(&["normalize", &fx(name), "-o", &out]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let o = pomset(&["--json", "check", &out]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["result"]["well_structured"], true, "{name}");
        assert_eq!(v["details"]["fork_acyclic"], true, "{name}");
        assert!(pomset(&["atoms", &out]).status.success());
    }
}

#[test]
fn compile_then_extract() {
    let out = scratch("compiled.json");
    let o = pomset(&["compile", "a.b* || c", "-o", &out]);
    assert_eq!(o.status.code(), Some(0));
    let o = pomset(&["extract", &out, "--state", "a . b* || c"]);
    assert_eq!(o.status.code(), Some(0));
    let back = stdout(&o);
    assert!(pomset(&["equiv", "a.b* || c", back.trim()]).status.success());
}

#[test]
fn atoms_marks_fork_targets() {
    let o = pomset(&["atoms", &fx("fork_distributivity")]);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "{q3, q3'}  [fork target]"));
    let o = pomset(&["atoms", &fx("run_confusion")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("normalize"));
}

#[test]
fn lang_lists_pomsets_by_size() {
    let o = pomset(&["lang", "a*", "--max-size", "2"]);
    assert_eq!(stdout(&o), "1\na\na . a\n");
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["equiv", "a.(", "b"],
        vec!["member", "--expr", "a", "A"],
        vec!["check", "/nonexistent/automaton.json"],
        vec!["member", "--pa", "x.json", "a"],
        vec!["extract", &fx("fork_join"), "--state", "nope"],
        vec!["bogus"],
    ] {
        let o = pomset(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "atoms", &fx("sequential_distributivity")];
    assert_eq!(pomset(&args).stdout, pomset(&args).stdout);
    let a = scratch("det1.json");
    let b = scratch("det2.json");
    pomset(&["normalize", &fx("fork_associativity"), "-o", &a, "--track", "q1,q1'"]);
    pomset(&["normalize", &fx("fork_associativity"), "-o", &b, "--track", "q1,q1'"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
