mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{bpplib_text, data_path};

fn exactpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exactpack"))
        .args(args)
        .env_remove("EXACTPACK_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_on_t60() {
    let inst = data_path("Falkenauer_T60_01.bpp");
    let o = exactpack(&["count", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "patterns=99\nsubsets=428786696323047746376\n");
}

#[test]
fn enumerate_prints_header_and_patterns() {
    let inst = data_path("Falkenauer_T60_01.bpp");
    let o = exactpack(&["enumerate", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("patterns=99"));
    assert_eq!(lines.count(), 99);
}

#[test]
fn verify_reference_solution() {
    let inst = data_path("Falkenauer_T60_01.bpp");
    let sol = data_path("Falkenauer_T60_01.reference.sol");
    let o = exactpack(&[
        "verify",
        "--instance",
        path_str(&inst),
        "--solution",
        path_str(&sol),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).trim(), "VALID");
}

#[test]
fn verify_rejects_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data_path("Falkenauer_T60_01.reference.sol")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = lines[1];
    let sol = dir.path().join("bad.sol");
    fs::write(&sol, lines.join("\n") + "\n").unwrap();
    let inst = data_path("Falkenauer_T60_01.bpp");
    let o = exactpack(&[
        "verify",
        "--instance",
        path_str(&inst),
        "--solution",
        path_str(&sol),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.starts_with("INVALID"), "{out}");
    assert!(out.contains("duplicate-bins"), "{out}");
    assert!(out.contains("spread-mismatch"), "{out}");
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("t60.sol");
    let inst = data_path("Falkenauer_T60_01.bpp");
    let o = exactpack(&[
        "solve",
        "--instance",
        path_str(&inst),
        "--output",
        path_str(&sol),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let written = fs::read_to_string(&sol).unwrap();
    assert!(
        written.starts_with("bins=20 per_bin=3 capacity=1000\n"),
        "{written}"
    );
    assert_eq!(written.lines().count(), 21);
    let o = exactpack(&[
        "verify",
        "--instance",
        path_str(&inst),
        "--solution",
        path_str(&sol),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn solve_json_and_all() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("small.txt");
    fs::write(&inst, "1 2 3 4 5 6 7 8 9\n").unwrap();
    let o = exactpack(&[
        "solve",
        "--instance",
        path_str(&inst),
        "--format",
        "list",
        "--capacity",
        "15",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bins"], 3);
    assert_eq!(v["per_bin"], 3);
    assert_eq!(v["packing"].as_array().unwrap().len(), 3);

    let o = exactpack(&[
        "solve",
        "--instance",
        path_str(&inst),
        "--capacity",
        "15",
        "--all",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let headers = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("bins="))
        .count();
    assert_eq!(headers, 2);
}

#[test]
fn infeasible_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("twos.bpp");
    fs::write(&inst, bpplib_text(&[2, 2, 2, 2], 4)).unwrap();
    let o = exactpack(&["solve", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "NO DISTINCT PACKING");
    let o = exactpack(&[
        "oracle",
        "--instance",
        path_str(&inst),
        "--mode",
        "multiplicity-bounded",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn timeout_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("wide.txt");
    let items: Vec<String> = (1..=24).map(|v| v.to_string()).collect();
    fs::write(&inst, items.join("\n") + "\n").unwrap();
    let o = exactpack(&[
        "solve",
        "--instance",
        path_str(&inst),
        "--format",
        "list",
        "--capacity",
        "75",
        "--all",
        "--timeout",
        "0.000000001",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).starts_with("TIMEOUT"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(exactpack(&[]).status.code(), Some(1));
    assert_eq!(exactpack(&["solve"]).status.code(), Some(1));
    assert_eq!(
        exactpack(&["solve", "--instance", "/nonexistent/file"])
            .status
            .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("uneven.bpp");
    fs::write(&inst, bpplib_text(&[300, 300, 301], 1000)).unwrap();
    let o = exactpack(&["solve", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
    let t60 = data_path("Falkenauer_T60_01.bpp");
    let o = exactpack(&["oracle", "--instance", path_str(&t60)]);
    assert_eq!(
        o.status.code(),
        Some(1),
        "oracle should refuse without --force"
    );
}

#[test]
fn bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    fs::copy(
        data_path("Falkenauer_T60_01.bpp"),
        data.join("Falkenauer_T60_01.bpp"),
    )
    .unwrap();
    fs::write(data.join("twos.bpp"), bpplib_text(&[2, 2, 2, 2], 4)).unwrap();
    let report = dir.path().join("report.json");
    let o = exactpack(&[
        "bench",
        "--dir",
        path_str(&data),
        "--report",
        path_str(&report),
        "--timeout",
        "30",
        "--workers",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(v["summary"]["solved"], 1);
    assert_eq!(v["summary"]["distinct_infeasible"], 1);
    assert!(stdout(&o).contains("Falkenauer_T60_01"));
}
