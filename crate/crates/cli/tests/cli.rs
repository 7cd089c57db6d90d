use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dgame(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgame")).args(args).env("DGAMES_CACHE_DIR", cache).output().expect("run dgame")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad record {l:?}: {e}")))
        .collect()
}

#[test]
fn gen_then_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgame(dir.path(), &["gen", "sts", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("block")).count(), 12);

    let file = dir.path().join("sts9.txt");
    std::fs::write(&file, &text).unwrap();
    let out = dgame(dir.path(), &["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["valid"], true);

    let out = dgame(dir.path(), &["gen", "td", "4", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("td k=4 n=4\npoints r1 r2 r3 r4 c1"));
}

#[test]
fn gen_rejects_unsupported_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgame(dir.path(), &["gen", "td", "4", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TD(4,6)"));
}

#[test]
fn check_reports_bad_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ts62.txt");
    let out = dgame(dir.path(), &["gen", "ts62-flawed", "-o", file.to_str().unwrap()]);
    assert!(out.status.success());
    let out = dgame(dir.path(), &["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let issues = records(&out)[0]["issues"].to_string();
    assert!(issues.contains("pair {2,4} covered 3 times"), "{issues}");

    let td = dir.path().join("td.txt");
    std::fs::write(&td, "td k=2 n=2\ngroup a b\ngroup c d\nblock a b\nblock c d\n").unwrap();
    assert_eq!(dgame(dir.path(), &["check", td.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn solve_reports_values_and_uses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgame(dir.path(), &["solve", "sts:7"]);
    assert!(out.status.success());
    let r = &records(&out)[0];
    assert_eq!(r["value"], "win_for_to_move");
    assert_eq!(r["source"], "solver");
    let again = &records(&dgame(dir.path(), &["solve", "sts:7"]))[0];
    assert_eq!(again["source"], "cached");
    assert_eq!(again["value"], r["value"]);

    let r = &records(&dgame(dir.path(), &["--no-cache", "solve", "td:4:3", "--variant", "mb"]))[0];
    assert_eq!(r["value"], "breaker_win");

    let r = &records(&dgame(dir.path(), &["solve", "ttt", "--moves", "x:5", "o:1", "x:9"]))[0];
    assert_eq!(r["to_move"], "Second");
}

#[test]
fn solve_budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgame(dir.path(), &["--no-cache", "solve", "td:4:5", "--budget-nodes", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(records(&out)[0]["value"], "unknown");
}

#[test]
fn solve_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out =
        dgame(dir.path(), &["--no-cache", "solve", "H3", "--variant", "mb", "--certificate", cert.to_str().unwrap()]);
    assert!(out.status.success());
    let c: Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    assert_eq!(c["side"], "Second");
    assert!(!c["moves"].as_array().unwrap().is_empty());
}

#[test]
fn criteria_prints_one_record_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let rs = records(&dgame(dir.path(), &["criteria", "td:4:3"]));
    assert_eq!(rs.len(), 3);
    let td = rs.iter().find(|r| r["criterion"] == "td-bounds").unwrap();
    assert_eq!(td["predicted"], "breaker");
}

#[test]
fn simulate_writes_a_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = dgame(
        dir.path(),
        &[
            "simulate",
            "sts:9",
            "--first",
            "sts-xeno",
            "--second",
            "random",
            "--seed",
            "3",
            "--transcript",
            path.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    assert_eq!(records(&out)[0]["outcome"], "first-win");
    let t: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(t["moves"][0]["score_before"].is_object());

    let out = dgame(dir.path(), &["simulate", "td:3:3", "--first", "score", "--second", "ophelia-handicap"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_small_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgame(dir.path(), &["table"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rs = records(&out);
    assert!(rs.iter().all(|r| r["matches"] == true));
    let row = |fam: &str, p: &str, v: &str| {
        rs.iter().find(|r| r["family"] == fam && r["parameter"] == p && r["variant"] == v).unwrap()
    };
    assert_eq!(row("TD(4,n)", "n=4", "maker-breaker")["outcome"], "second-win");
    assert_eq!(row("TD(4,n)", "n=3", "maker-breaker")["source"], "criterion");
    for n in 3..=5 {
        assert_eq!(row("TD(3,n)", &format!("n={n}"), "strong")["outcome"], "first-win");
    }
}

#[test]
fn augment_and_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let r = &records(&dgame(dir.path(), &["augment", "td:4:4", "--groups", "2"]))[0];
    assert_eq!(r["maker_breaker"], "breaker-win");
    let r = &records(&dgame(dir.path(), &["augment", "td:4:4", "--groups", "3"]))[0];
    assert_eq!(r["strong"], "xeno-win");

    let out = dgame(dir.path(), &["reduce", "td:4:4", "r1", "r2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("v 14\n"), "{text}");
}

#[test]
fn orbits_of_the_empty_board() {
    let dir = tempfile::tempdir().unwrap();
    let r = &records(&dgame(dir.path(), &["orbits", "sts:7"]))[0];
    assert_eq!(r["orbits"].as_array().unwrap().len(), 1);
    let r = &records(&dgame(dir.path(), &["orbits", "ttt"]))[0];
    assert_eq!(r["orbits"].as_array().unwrap().len(), 3);
}
