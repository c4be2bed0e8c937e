use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gpdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpdkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn emit(name: &str, dir: &Path) -> String {
    let path = dir.join(format!("{name}.gpd"));
    let p = path.to_str().unwrap().to_string();
    let out = gpdkit(&["example", name, "--emit", "-o", &p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn emitted_s4_document_checks_clean() {
    let dir = tempfile::tempdir().unwrap();
    let p = emit("s4", dir.path());
    let out = gpdkit(&["check", &p]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["data"]["blocks"].as_array().unwrap().len(), 3);
}

#[test]
fn emitted_s4_matches_the_shipped_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let p = emit("s4", dir.path());
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/s4.gpd");
    assert_eq!(std::fs::read_to_string(p).unwrap(), std::fs::read_to_string(shipped).unwrap());
}

#[test]
fn equiv_on_s4_reports_principality() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/s4.gpd");
    let out = gpdkit(&["equiv", shipped.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let checks = r["checks"].as_array().unwrap();
    let principal = checks.iter().find(|c| c["check"] == "A/principal").expect("principality check present");
    assert_eq!(principal["status"], "pass");
}

#[test]
fn mutated_action_cell_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = emit("s4", dir.path());
    let text = std::fs::read_to_string(&p).unwrap();
    // Point the first non-identity action cell at the value of the next cell.
    let lines: Vec<&str> = text.lines().collect();
    let i = lines.iter().position(|l| l.starts_with("act ") && !l.starts_with("act e ")).unwrap();
    let other = lines[i + 1].rsplit(" = ").next().unwrap();
    let mutated = format!("{} = {other}", lines[i].rsplit_once(" = ").unwrap().0);
    assert_ne!(mutated, lines[i]);
    let mut out_lines: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    out_lines[i] = mutated;
    std::fs::write(&p, out_lines.join("\n") + "\n").unwrap();
    let out = gpdkit(&["check", &p]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["status"], "fail");
    let failed = r["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert!(failed["witness"]["ids"].as_array().is_some_and(|ids| !ids.is_empty()));
}

#[test]
fn parse_error_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.gpd");
    std::fs::write(&p, "[groupoid A]\nelements = a\nmul a a = b\n").unwrap();
    let out = gpdkit(&["check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["data"]["diagnostic"]["kind"], "reference");
    assert_eq!(r["data"]["diagnostic"]["line"], 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gpdkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gpdkit(&["check"]).status.code(), Some(2));
    assert_eq!(gpdkit(&["check", "/nonexistent/file.gpd"]).status.code(), Some(2));
    assert_eq!(gpdkit(&["example", "nope"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_gpdkit"))
        .args(["example", "dr-z6"])
        .env("GPDKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_the_report() {
    let run = |n: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gpdkit"))
            .args(["example", "semidirect"])
            .env("GPDKIT_THREADS", n)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn every_verb_passes_on_every_example() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["s4", "semidirect", "skew", "dr-z6", "crossed"] {
        let p = emit(name, dir.path());
        for verb in ["check", "product", "quotient", "equiv", "algebra", "fell", "dr"] {
            let out = gpdkit(&[verb, &p]);
            assert_eq!(out.status.code(), Some(0), "{verb} on {name}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
}

#[test]
fn dr_reports_the_period_of_t() {
    let dir = tempfile::tempdir().unwrap();
    let p = emit("dr-z6", dir.path());
    let r = json(&gpdkit(&["dr", &p]));
    assert_eq!(r["status"], "pass");
    assert_eq!(r["data"]["dr"]["Z6"]["period"], 2);
    assert_eq!(r["data"]["dr"]["Z6"]["free"], false);
}

#[test]
fn product_emit_writes_a_parseable_document() {
    let dir = tempfile::tempdir().unwrap();
    let p = emit("skew", dir.path());
    let q = dir.path().join("prod.gpd");
    let out = gpdkit(&["product", &p, "--emit", q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = gpdkit(&["check", q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}
