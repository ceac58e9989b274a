use std::path::Path;
use std::process::{Command, Output};

use symforge::report::{validate_document, ReportDocument};

fn symforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symforge"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn classical_one_one_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = symforge(&[
        "verify",
        "--target",
        "classical",
        "--m",
        "1",
        "--n",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = read_json(&path);
    validate_document(&v).unwrap();
    let doc: ReportDocument = serde_json::from_value(v).unwrap();
    assert!(doc.passed());
    assert_eq!(doc.reports.len(), 1);
}

#[test]
fn quantum_two_one_passes_with_documented_discrepancies() {
    let o = symforge(&["verify", "--target", "quantum", "--m", "2", "--n", "1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(
        s.contains("DISC quantum (m=2, n=1): E matches reference closed form"),
        "{s}"
    );
    assert!(s.ends_with("result: pass\n"));
}

#[test]
fn invalid_ratio_is_a_usage_error() {
    assert_eq!(code(&symforge(&["verify", "--m", "2", "--n", "4"])), 2);
    assert_eq!(code(&symforge(&["verify", "--m", "2"])), 2);
    assert_eq!(code(&symforge(&["frobnicate"])), 2);
}

#[test]
fn injected_fault_fails_the_run() {
    let o = symforge(&[
        "verify",
        "--target",
        "quantum",
        "--m",
        "2",
        "--n",
        "1",
        "--inject-fault",
        "wrong-lambda",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("result: FAIL"));
}

#[test]
fn reports_are_deterministic_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = symforge(&[
            "verify",
            "--target",
            "classical",
            "--m",
            "3",
            "--n",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        let mut v = read_json(&p);
        v["timestamp"] = 0.into();
        v
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn simulate_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let o = symforge(&["simulate", "--tmax", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,theta,phi,p_theta,p_phi,H,Hphi,O,E");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 501);
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
    let summary = read_json(&dir.path().join("orbit.csv.report.json"));
    assert_eq!(summary["status"], "ok");
    assert!(summary["max_drift"].as_f64().unwrap() <= 1e-8);
    assert!(String::from_utf8_lossy(&o.stderr).contains("relative drift"));
}

#[test]
fn simulate_integration_error_exits_three_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fall.csv");
    let o = symforge(&[
        "simulate",
        "--alpha2",
        "0",
        "--phi0",
        "0",
        "--pphi0",
        "0",
        "--tmax",
        "10",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert!(rows > 2);
    let summary = read_json(&dir.path().join("fall.csv.report.json"));
    assert_eq!(summary["status"], "integration-error");
    assert!(summary["t_end"].as_f64().unwrap() < 10.0);
}

#[test]
fn simulate_rejects_unphysical_start() {
    assert_eq!(code(&symforge(&["simulate", "--theta0", "4", "--out", "/dev/null"])), 2);
}

#[test]
fn show_prints_expressions() {
    let o = symforge(&["show", "--m", "1", "--n", "1", "O"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).trim().is_empty());
    for which in ["E", "Ohat", "Ehat", "P1", "P2"] {
        assert_eq!(code(&symforge(&["show", "--m", "2", "--n", "1", which])), 0, "{which}");
    }
    let e = stdout(&symforge(&["show", "--m", "1", "--n", "1", "E"]));
    let free = stdout(&symforge(&["show", "--m", "1", "--n", "1", "E", "--alpha2", "0"]));
    assert!(e.contains("a*") && !free.contains("a*"), "{e} / {free}");
    assert_eq!(code(&symforge(&["show", "--m", "1", "--n", "1", "Q"])), 2);
}

#[test]
fn spectrum_lists_levels_and_dumps_eigenfunctions() {
    let dir = tempfile::tempdir().unwrap();
    let o = symforge(&[
        "spectrum",
        "--problem",
        "theta",
        "--M",
        "0",
        "--grid",
        "500",
        "--levels",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let eig: Vec<f64> = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (got, want) in eig.iter().zip([0.0, 2.0, 6.0]) {
        assert!((got - want).abs() < 1e-3, "{s}");
    }
    let f = std::fs::read_to_string(dir.path().join("level_2.csv")).unwrap();
    assert_eq!(f.lines().count(), 501);
}
