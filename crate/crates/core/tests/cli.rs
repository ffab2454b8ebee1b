use std::path::PathBuf;
use std::process::{Command, Output};

use infinir::cli::run;

fn dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("infinir-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn file(name: &str, text: &str) -> String {
    let p = dir().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn exec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infinir")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const EQUATION: &str = "C(a) = a\nterm cw = rec X = C(X) in X\n";
const COLLAPSE: &str = "C(a) -> a\nterm cw = rec X = C(X) in X\n";
const DOUBLING: &str = "f(x,x) -> D\na -> C(a)\nb -> C(b)\n";

#[test]
fn check_exit_codes() {
    let eq = file("eq.trs", EQUATION);
    let rw = file("rw.trs", COLLAPSE);
    let dbl = file("dbl.trs", DOUBLING);
    let o = exec(&["check", &eq, "--rel", "ieq", "--from", "cw", "--to", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "proved (exact, 3 terms)\n");
    let o = exec(&["check", &rw, "--rel", "ired", "--from", "cw", "--to", "a"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "refuted (exact, 3 terms)\n");
    let o = exec(&["check", &dbl, "--rel", "ired", "--from", "f(a,b)", "--to", "D"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "proved (search)\n");
}

#[test]
fn unknown_when_budgets_run_out() {
    let grow = file("grow.trs", "C(x) -> C(C(x))\n");
    let o = exec(&[
        "check", &grow, "--rel", "ired", "--from", "C(a)", "--to", "a", "--universe-budget", "4", "--budget-nodes", "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "unknown\n");
}

#[test]
fn input_errors_exit_three() {
    let eq = file("eq2.trs", EQUATION);
    let o = exec(&["check", &eq, "--rel", "ired", "--from", "cw", "--to", "a"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("equational"));
    let bad = file("bad.trs", "C(a -> a\n");
    let o = exec(&["check", &bad, "--rel", "bi", "--from", "a", "--to", "a"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: 1:"));
    let mixed = file("mixed.trs", "C(a) -> a\nC(b) = b\n");
    assert_eq!(exec(&["unfold", &mixed, "a", "--depth", "1"]).status.code(), Some(3));
    assert_eq!(exec(&["unfold", "/nonexistent/file", "a", "--depth", "1"]).status.code(), Some(3));
    assert_eq!(exec(&["check", &eq]).status.code(), Some(3));
    assert_eq!(exec(&["--help"]).status.code(), Some(0));
}

#[test]
fn prove_verify_round_trip() {
    for (name, text, rel, from, to) in [
        ("p1.trs", EQUATION, "ieq", "cw", "a"),
        ("p2.trs", COLLAPSE, "bi", "cw", "a"),
        ("p3.trs", DOUBLING, "ired", "f(a,b)", "D"),
    ] {
        let f = file(name, text);
        let cert = dir().join(format!("{name}.json"));
        let c = cert.to_string_lossy().into_owned();
        let o = exec(&["prove", &f, "--rel", rel, "--from", from, "--to", to, "--emit", &c]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v = exec(&["verify", &f, &c]);
        assert_eq!(v.status.code(), Some(0), "{name}: {}", stdout(&v));
        assert_eq!(stdout(&v), "ok\n");
    }
}

#[test]
fn verify_rejects_tampered_certificates() {
    let f = file("t.trs", EQUATION);
    let o = exec(&["prove", &f, "--rel", "ieq", "--from", "cw", "--to", "a"]);
    let doc = stdout(&o).replace("\"C(a)\"", "\"C(C(a))\"");
    let c = file("tampered.json", &doc);
    let v = exec(&["verify", &f, &c]);
    assert_eq!(v.status.code(), Some(1));
    let garbage = file("garbage.json", "{ not json");
    assert_eq!(exec(&["verify", &f, &garbage]).status.code(), Some(1));
}

#[test]
fn compress_outputs() {
    let dbl = file("c1.trs", DOUBLING);
    let o = exec(&["compress", &dbl, "--from", "f(a,b)", "--to", "D"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("NotLeftLinear"));
    let omega = file("c2.trs", "a -> C(a)\nterm cw = rec X = C(X) in X\n");
    let o = exec(&["compress", &omega, "--from", "a", "--to", "cw", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[]  0  C(a)\n[1]  0  C(C(a))\n[1,1]  0  C(C(C(a)))\n");
    let o = exec(&["compress", &omega, "--from", "a", "--to", "cw"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["kind"], "ored");
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 1);
}

#[test]
fn unfold_distance_and_dot() {
    let eq = file("u.trs", EQUATION);
    let o = exec(&["distance", &eq, "cw", "C(a)"]);
    assert_eq!(stdout(&o), "2^-1\n");
    let o = exec(&["distance", &eq, "cw", "rec Y = C(C(Y)) in Y"]);
    assert_eq!(stdout(&o), "0\n");
    let o = exec(&["unfold", &eq, "cw", "--depth", "2"]);
    assert_eq!(stdout(&o), "C(C(#))\n");
    let dbl = file("d.trs", DOUBLING);
    let o = exec(&["prove", &dbl, "--rel", "ired", "--from", "f(a,b)", "--to", "D", "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph proof {"));
    assert_eq!(dot.matches("style=dashed, color=red").count(), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dbl = file("det.trs", DOUBLING);
    let args = ["prove", &dbl, "--rel", "ired", "--from", "f(a,b)", "--to", "D"];
    let a = exec(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_infinir"))
        .args(args)
        .env("INFINIR_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn in_process_runner_matches_binary() {
    let eq = file("inproc.trs", EQUATION);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["infinir", "distance", eq.as_str(), "cw", "C(a)"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, b"2^-1\n");
    assert!(err.is_empty());
}
