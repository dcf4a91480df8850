use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypercube-sat"));
    c.env_remove("HYPERCUBE_SAT_SOLVER");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn encode_is_deterministic_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.cnf", "b.cnf"] {
        let o = run(d, &["encode", "--conjecture", "1", "--n", "4", "-o", out, "--registry", "reg.txt"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(d.join("a.cnf")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.cnf")).unwrap());
    assert!(a.starts_with(b"p cnf ") || a.starts_with(b"c "));

    let m: Value = serde_json::from_str(&std::fs::read_to_string(d.join("a.cnf.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "encode");
    assert_eq!(m["outputs"][0]["path"], "a.cnf");
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(std::fs::read_to_string(d.join("reg.txt")).unwrap().lines().count() > 0);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["encode", "--conjecture", "7", "--n", "4", "-o", "x"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["bound", "--kind", "mu", "--n", "4", "-o", "x"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["oracle", "--kind", "f", "--n", "4"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_small_instances_with_internal_solver() {
    let dir = tempfile::tempdir().unwrap();
    for (k, n) in [("2", "4"), ("3", "2")] {
        let o = run(dir.path(), &["verify", "--conjecture", k, "--n", n, "--solver", "internal"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let r = stdout_json(&o);
        assert_eq!(r["verdict"], "unsat");
        assert!(r["counterexample"].is_null());
        // no output file, so the manifest goes to stderr
        let m: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(m["subcommand"], "verify");
    }
}

#[test]
fn exhausted_budget_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["encode", "--conjecture", "1", "--n", "5", "--no-symmetry-breaking", "--no-red-degree", "-o", "p.cnf"])
        .status
        .success());
    let o = run(d, &["solve", "p.cnf", "--solver", "internal", "--conflicts", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["verdict"], "unknown");
}

#[test]
fn bound_search_record_feeds_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["bound-search", "--kind", "f", "--n", "3", "--solver", "internal", "--records", "runs"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["value"]["fraction"], "1/1");
    assert!(d.join("runs/f-n3.json").exists());
    assert!(d.join("runs/f-n3.coloring").exists());
    assert!(d.join("runs/f-n3.json.manifest.json").exists());

    let o = run(d, &["report", "--kind", "bounds", "--records", "runs"]);
    assert!(o.status.success());
    let table = String::from_utf8_lossy(&o.stdout);
    let row = table.lines().find(|l| l.trim_start().starts_with("f   3")).expect("f(3) row");
    assert!(row.ends_with("match"), "{row}");
    assert!(table.contains("missing records"));
}

#[test]
fn oracle_and_profile_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["oracle", "--kind", "mu", "--n", "3"]);
    assert!(o.status.success());
    let r = stdout_json(&o);
    assert_eq!(r["value"], 1);
    assert_eq!(r["colorings_evaluated"], 4096);

    std::fs::write(d.join("c.txt"), r["argmax_coloring"].as_str().unwrap()).unwrap();
    let o = run(d, &["oracle", "--kind", "profile", "--coloring", "c.txt"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = stdout_json(&o);
    assert_eq!(p["blocking_pairs"], 1);
    assert_eq!(p["profiles"].as_array().unwrap().len(), 8);
}

#[test]
fn simulate_reports_bound_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--n", "9", "--k", "3", "--trials", "500", "--seed", "5", "--coloring", "random"];
    let a = stdout_json(&run(dir.path(), &args));
    let b = stdout_json(&run(dir.path(), &args));
    assert_eq!(a["mean"], b["mean"]);
    assert_eq!(a["bound"], 4.5);
    assert_eq!(a["pass"], true);
}

#[test]
fn cube_campaign_resume_and_dry_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["encode", "--conjecture", "2", "--n", "4", "-o", "psi.cnf"]).status.success());
    let o = run(d, &["cube", "psi.cnf", "--depth", "3", "-o", "psi.icnf"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["cubes"], 8);

    let o = run(d, &["campaign", "psi.cnf", "--cubes", "psi.icnf", "--journal", "j.jsonl", "--solver", "internal", "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["report"]["verdict"], "unsat");

    // a finished journal resumes without new work
    let o = run(d, &["campaign", "psi.cnf", "--cubes", "psi.icnf", "--resume", "j.jsonl", "--solver", "internal"]);
    assert_eq!(stdout_json(&o)["report"]["solved_this_run"], 0);
    assert_eq!(run(d, &["campaign", "psi.cnf", "--cubes", "psi.icnf", "--journal", "j.jsonl"]).status.code(), Some(2));

    let o = run(d, &["campaign", "psi.cnf", "--cubes", "psi.icnf", "--journal", "dry.jsonl", "--dry-run", "--static-schedule"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["report"]["verdict"], "unsat");
}

#[test]
fn external_solver_via_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let stub = d.join("stub.sh");
    std::fs::write(&stub, "#!/bin/sh\necho 's UNSATISFIABLE'\nexit 20\n").unwrap();
    std::fs::set_permissions(&stub, std::os::unix::fs::PermissionsExt::from_mode(0o755)).unwrap();
    assert!(run(d, &["encode", "--conjecture", "2", "--n", "3", "-o", "f.cnf"]).status.success());
    let o = bin().current_dir(d).env("HYPERCUBE_SAT_SOLVER", format!("{} {{}}", stub.display())).args(["solve", "f.cnf"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["verdict"], "unsat");
}
