use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inverse-teleport"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn invert_prints_report_and_is_deterministic() {
    let args = ["invert", "--unitary", "U2", "--trials", "2000", "--seed", "9"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["trials"], 2000);
    assert_eq!(report["failures"], 0);
    let seq = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.stdout, seq.stdout);
}

#[test]
fn invert_force_success() {
    let out = run(&["invert", "--unitary", "0.3,1.0,2.0", "--trials", "100", "--force-success"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["queries"]["mean"], 1.0);
    assert!(report["fidelity_min"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn tomography_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "tomography",
        "--unitary",
        "U3",
        "--shots",
        "20000",
        "--noise-p",
        "0.05",
        "--noise-target",
        "resource",
        "--jobs",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["noise"]["applied_to"], "resource");
    let expected = 1.0 - 0.75 * (1.0 - 0.95f64 * 0.95);
    assert!((report["exact_channel_fidelity"].as_f64().unwrap() - expected).abs() < 1e-12);
    for name in ["counts.csv", "report.json", "chi_real.svg", "chi_imag.svg", "chi_ideal_real.svg", "chi_ideal_imag.svg"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let svg = fs::read_to_string(dir.path().join("chi_real.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="bar""#).count(), 16);
    let csv = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert!(csv.starts_with("probe,basis,n_plus,n_minus,shots"));
    assert_eq!(csv.lines().count(), 19);
}

#[test]
fn reproduce_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce-paper", "--shots", "20000", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    for label in ["U1^-1", "U2^-1", "U3^-1", "average"] {
        assert!(table.contains(label), "{table}");
    }
    assert!(dir.path().join("summary.json").is_file());
    assert!(dir.path().join("U2").join("counts.csv").is_file());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["invert", "--shots", "0"][..],
        &["invert", "--trials", "0"],
        &["invert", "--noise-p", "1.5"],
        &["invert", "--unitary", "1,2"],
        &["invert", "--unitary", "/definitely/missing.json"],
        &["invert", "--jobs", "0"],
        &["invert", "--bogus"],
        &["tomography", "--noise-target", "sideways"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["tomography", "--help"]).status.code(), Some(0));
}
