//! End-to-end runs of the `ctrs` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ctrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctrs")).args(args).env("CTRS_COLOR", "0").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reach_counts_steps() {
    let o = ctrs(&["reach", &corpus("R0.ctrs"), "--from", "a", "--to", "e", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "reachable (2 steps)");
}

#[test]
fn unravel_matches_golden() {
    let o = ctrs(&["unravel", "--method", "uopt", &corpus("R2.ctrs")]);
    assert_eq!(o.status.code(), Some(0));
    let got = ctrs::format::parse_system(&stdout(&o)).expect("output parses");
    let want = ctrs::corpus::golden("Uopt_R2").unwrap().unwrap();
    assert!(ctrs::alpha::alpha_u_equal(&got, &want));
}

#[test]
fn empty_system_classifies() {
    let dir = std::env::temp_dir().join(format!("ctrs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("empty.ctrs");
    std::fs::write(&f, "(VAR x)\n(RULES\n)\n").unwrap();
    let o = ctrs(&["classify", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("deterministic: true"));
}

#[test]
fn exit_codes() {
    assert_eq!(ctrs(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(ctrs(&["unravel", "--method", "bogus", &corpus("R2.ctrs")]).status.code(), Some(2));
    assert_eq!(ctrs(&["classify", "/nonexistent/file.ctrs"]).status.code(), Some(1));
    // UJ-only systems are rejected by U with a domain error.
    assert_eq!(ctrs(&["unravel", "--method", "u", &corpus("R12.ctrs")]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["transform", "--method", "sr", &corpus("R7.ctrs")];
    let a = ctrs(&args);
    let b = ctrs(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_parses() {
    let o = ctrs(&["--json", "report", &corpus("R2.ctrs")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("valid json");
    assert!(v["applies"]["Uopt"].as_array().unwrap().iter().any(|x| x == "uopt.sound.ultra-rlne"));
}

#[test]
fn search_finds_r3_counterexample() {
    let o = ctrs(&["search-unsound", &corpus("R3.ctrs"), "--method", "uopt", "--start", "h(f(a),f(b))", "--target", "A", "--steps", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("counterexample_found\n"));
}

#[test]
fn check_homo_canonical() {
    let dir = std::env::temp_dir().join(format!("ctrs-homo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let r2 = ctrs::corpus::load("R2").unwrap();
    let (u, uopt) = (dir.join("u.trs"), dir.join("uopt.trs"));
    std::fs::write(&u, ctrs::format::render_system(&ctrs::unravel::unravel_u(&r2).unwrap())).unwrap();
    std::fs::write(&uopt, ctrs::format::render_system(&ctrs::unravel::unravel_uopt(&r2).unwrap())).unwrap();
    let o = ctrs(&[
        "check-homo",
        "--lhs",
        uopt.to_str().unwrap(),
        "--rhs",
        u.to_str().unwrap(),
        "--canonical",
        "u_to_uopt",
        "--source",
        &corpus("R2.ctrs"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("equal\n"));
}

#[test]
fn rewrite_sr_leftmost_innermost() {
    let o = ctrs(&["rewrite", &corpus("R7.ctrs"), "--term", "split(0,nil)", "--strategy", "li"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("normal form"));
}
