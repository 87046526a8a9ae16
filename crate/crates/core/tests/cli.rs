use std::path::{Path, PathBuf};
use std::process::Command;

use tfag::catalog;
use tfag::cli;
use tfag::spec::{self, GroupSpec};

fn write_catalog(dir: &Path) {
    for e in catalog::all().unwrap() {
        std::fs::write(dir.join(format!("{}.json", e.name)), spec::emit_spec(&spec::from_entry(&e))).unwrap();
    }
}

fn run(args: &[&str]) -> (i32, cli::Report) {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    cli::run(&argv)
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn square_files(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let e = catalog::theorem15_group().unwrap();
    let (sq, x, y) = catalog::theorem15_square_witness(&e).unwrap();
    let s = GroupSpec {
        group: sq,
        elements: vec![],
    };
    let paths = (dir.join("thm15sq.json"), dir.join("x.json"), dir.join("y.json"));
    std::fs::write(&paths.0, spec::emit_spec(&s)).unwrap();
    std::fs::write(&paths.1, serde_json::json!({ "element": x.to_string() }).to_string()).unwrap();
    std::fs::write(&paths.2, serde_json::json!(y.to_string()).to_string()).unwrap();
    (paths.0, paths.1, paths.2)
}

#[test]
fn claim_c_replay() {
    let (code, r) = run(&["paper", "claimC"]);
    assert_eq!(code, 0);
    assert_eq!(r.text[0], "End(G) = Z·I");
    assert!(r.text.iter().any(|l| l.starts_with("M1: [1 0 0; 0 1 0; 0 0 1]")));
}

#[test]
fn every_replay_meets_expectations() {
    for name in ["ex1", "ex3", "ex5", "ex6", "compl", "thm15", "claimA", "claimB", "composed"] {
        let (code, r) = run(&["paper", name, "--samples", "6"]);
        assert_eq!(code, 0, "{name}: {:?}", r.text);
    }
    assert_eq!(run(&["paper", "nonsense"]).0, 1);
}

#[test]
fn square_is_not_krylov_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (sq, x, y) = square_files(dir.path());
    let (code, r) = run(&["check", "krylov", sq.to_str().unwrap(), x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(r.results["verdict"], "fails");
}

#[test]
fn chi_of_example6_generator_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_catalog(dir.path());
    let (code, r) = run(&["chi", &p(dir.path(), "example6.json"), "(5,1)"]);
    assert_eq!(code, 0);
    assert_eq!(r.results["rest"], 0);
    assert!(r.results["explicit"].as_object().unwrap().values().all(|v| v == 0));
    assert!(r.results["families"].as_object().unwrap().values().all(|v| v == 0));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_catalog(dir.path());
    let ex3 = p(dir.path(), "example3.json");
    assert_eq!(run(&["check", "trans", &ex3, "a2", "(0,-1,0)"]).0, 0);
    assert_eq!(run(&["check", "full", &ex3, "a1", "a2"]).0, 3);
    assert_eq!(run(&["check", "trans", &ex3, "(1,2,0)", "(2,1,3)", "--bound", "0"]).0, 3);
    assert_eq!(run(&["check", "bogus", &ex3, "a1", "a2"]).0, 1);
    assert_eq!(run(&["check", "trans", &ex3, "(1,2)", "a2"]).0, 1);
}

#[test]
fn build_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_catalog(dir.path());
    for e in catalog::NAMES {
        let path = p(dir.path(), &format!("{e}.json"));
        let (code, r) = run(&["build", &path]);
        assert_eq!(code, 0);
        let again = p(dir.path(), "again.json");
        std::fs::write(&again, format!("{}\n", r.text[0])).unwrap();
        let (_, r2) = run(&["build", &again]);
        assert_eq!(r.text, r2.text, "{e}");
        assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), r.text[0]);
    }
}

#[test]
fn malformed_and_invalid_specs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["build", bad.to_str().unwrap()]).0, 1);
    assert_eq!(run(&["build", "/nonexistent/spec.json"]).0, 1);
    let invalid = dir.path().join("invalid.json");
    let text = r#"{"name": "g", "rank": 1, "registry": {"explicit": [4], "families": []}, "locals": {}}"#;
    std::fs::write(&invalid, text).unwrap();
    assert_eq!(run(&["build", invalid.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_catalog(dir.path());
    let args = [
        "--json",
        "classify",
        &p(dir.path(), "example5.json"),
        "--samples",
        "8",
        "--seed",
        "4",
    ]
    .map(String::from);
    let a = serde_json::to_string(&cli::run(&args).1).unwrap();
    let b = serde_json::to_string(&cli::run(&args).1).unwrap();
    assert_eq!(a, b);
    let (_, r) = cli::run(&args);
    assert_eq!(r.seed, Some(4));
    assert_eq!(r.results["region"], 5);
    assert_eq!(r.inputs_digest.len(), 64);
}

#[test]
fn oracle_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    write_catalog(dir.path());
    let (code, r) = run(&["oracle", "height", &p(dir.path(), "example3.json"), "a2", "--per-family", "1"]);
    assert_eq!(code, 0, "{:?}", r.text);
    assert_eq!(r.results["agrees"], true);
    let (code, r) = run(&["oracle", "end", &p(dir.path(), "example6.json")]);
    assert_eq!(code, 0);
    assert_eq!(r.results["brute_force"].as_array().unwrap().len(), 125);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tfag");
    let out = Command::new(bin).args(["paper", "claimC"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("End(G) = Z·I"));
    let dir = tempfile::tempdir().unwrap();
    let (sq, x, y) = square_files(dir.path());
    let out = Command::new(bin)
        .arg("--json")
        .arg("check")
        .arg("krylov")
        .arg(&sq)
        .arg(&x)
        .arg(&y)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["verdict"], "fails");
    let out = Command::new(bin)
        .arg("build")
        .arg(dir.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
