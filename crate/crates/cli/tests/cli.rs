use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxindex")).args(args).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    serde_json::from_slice(&out.stdout).expect("json records")
}

fn find<'a>(rows: &'a [Value], statement: &str) -> &'a Value {
    rows.iter().find(|r| r["statement"] == statement).unwrap_or_else(|| panic!("no row {statement}"))
}

#[test]
fn bounds_rows_carry_the_table() {
    let out = run(&["bounds", "--n", "9..=11", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&out);
    assert_eq!(rows.len(), 3);
    let n9 = find(&rows, "bound n=9");
    assert_eq!(n9["status"], "known_discrepancy");
    assert_eq!(n9["computed"]["bound_table"], 37);
    assert_eq!(n9["computed"]["bound_recomputed"], 36);
    let n11 = find(&rows, "bound n=11");
    assert_eq!(n11["computed"]["bound_table"], 50);
    assert_eq!(n11["computed"]["gap"], 16);
}

#[test]
fn bounds_table_format_has_a_header() {
    let out = run(&["bounds", "--n", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("status"));
    assert!(lines.next().unwrap().starts_with("PASS"));
}

#[test]
fn invariants_of_a_catalog_entry() {
    let out = run(&["invariants", "--catalog", "D4", "--strict", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&out);
    assert_eq!(find(&rows, "s")["computed"], 12);
    assert_eq!(find(&rows, "min")["computed"], "2");
}

#[test]
fn invariants_of_a_gram_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.json");
    std::fs::write(&path, r#"{"name": "a2", "dim": 2, "gram": [[2, -1], [-1, 2]]}"#).unwrap();
    let out = run(&["invariants", "--gram", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(find(&records(&out), "s")["computed"], 3);
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    let indefinite = dir.path().join("indefinite.json");
    std::fs::write(&indefinite, r#"{"name": "x", "dim": 2, "gram": [[1, 2], [2, 1]]}"#).unwrap();
    for args in [
        vec!["invariants", "--gram", garbage.to_str().unwrap()],
        vec!["invariants", "--gram", indefinite.to_str().unwrap()],
        vec!["invariants", "--catalog", "no-such-entry"],
        vec!["bounds", "--n", "3"],
        vec!["bounds", "--n", "ten"],
        vec!["search", "--p", "5", "--n", "8"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn search_reports_a_witness() {
    let out = run(&["search", "--p", "3", "--n", "7", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &records(&out)[0];
    assert_eq!(row["status"], "pass");
    assert_eq!(row["computed"]["max_size"], 7);
    assert_eq!(row["computed"]["witness"].as_array().unwrap().len(), 7);
}

#[test]
fn exhausted_budget_exits_with_3() {
    let out = run(&["search", "--p", "4", "--n", "10", "--budget-nodes", "100", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(records(&out)[0]["status"], "budget_exhausted");
}

#[test]
fn verify_reproduces_the_combinatorial_statements() {
    let out = run(&["verify", "--format", "json"]);
    let rows = records(&out);
    for statement in ["table bound n=16", "max family p=4 n=10", "maximal type-2 graphs n=6", "max t1+t2 n=8", "gap positive and non-decreasing, n=6..1000"] {
        assert_eq!(find(&rows, statement)["status"], "pass", "{statement}");
    }
    let failing: Vec<&Value> = rows.iter().filter(|r| r["status"] == "fail").collect();
    assert_eq!(out.status.code(), Some(if failing.is_empty() { 0 } else { 1 }));
}
