use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_condtele"));
    cmd.args(args).arg("--out").arg(dir).env_remove("CONDTELE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn cv_avg_reports_the_standard_headline() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "cv-avg", "--lambda", "0.8", "--alpha", "1.5", "--gain", "1", "--kind", "standard",
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let path = tmp.path().join("cv_avg.csv");
    let (header, _) = read_csv(&path);
    assert_eq!(header, ["lambda", "g", "gamma_re", "gamma_im", "fbar", "err"]);
    assert!((column(&path, "fbar")[0] - 0.9).abs() < 5e-4);
    assert!(tmp.path().join("cv_avg.config.json").exists());
}

#[test]
fn cv_avg_classical_limit() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["cv-avg", "--lambda", "0", "--alpha", "2-1i"], &[]);
    assert_eq!(code(&o), 0);
    assert!((column(&tmp.path().join("cv_avg.csv"), "fbar")[0] - 0.5).abs() < 1e-9);
}

#[test]
fn boundary_scan_json_summary() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["boundary-scan", "--format", "json"], &[]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("boundary_scan.json")).unwrap()).unwrap();
    let s = &doc["summary"];
    assert!((s["gap_argmax_lambda"].as_f64().unwrap() - 0.37).abs() <= 0.02 + 1e-12);
    assert!((s["standard_crossing"].as_f64().unwrap() - 1.0 / 3.0).abs() < 0.01);
    assert_eq!(doc["meta"]["command"], "boundary-scan");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 95);
    assert!(doc["rows"][0]["subtracted"].is_number());
}

#[test]
fn csv_numbers_carry_ten_significant_digits() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&run(tmp.path(), &["phase-density", "--points", "21"], &[])), 0);
    let (_, rows) = read_csv(&tmp.path().join("phase_density.csv"));
    for field in rows.iter().flatten() {
        let (mantissa, _) = field.split_once('e').expect("scientific notation");
        let digits = mantissa.trim_start_matches('-').replace('.', "");
        assert_eq!(digits.len(), 10, "{field}");
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "gain-scan",
        "--gains",
        "0.6:0.8:0.1",
        "--gammas",
        "1.8:2.4:0.1",
        "--format",
        "json",
    ];
    assert_eq!(code(&run(a.path(), &args, &[("CONDTELE_THREADS", "1")])), 0);
    assert_eq!(code(&run(b.path(), &args, &[("CONDTELE_THREADS", "4")])), 0);
    for name in ["gain_scan.json", "gain_scan.config.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn invalid_configuration_exits_three() {
    let tmp = TempDir::new().unwrap();
    for args in [
        vec!["cv-avg", "--lambda", "1.0"],
        vec!["cv-avg", "--no-such-flag"],
        vec!["cv-avg", "--alpha", "1.5q"],
        vec!["cv-avg", "--epsilon", "2"],
        vec!["cv-avg", "--order", "4"],
        vec!["entropy-curve", "--lambdas", "0.5:0.1:0.1"],
        vec!["cv-avg", "--input", "cat", "--parity", "odd", "--alpha", "0"],
    ] {
        assert_eq!(code(&run(tmp.path(), &args, &[])), 3, "{args:?}");
    }
    assert_eq!(code(&run(tmp.path(), &["cv-avg"], &[("CONDTELE_THREADS", "zero")])), 3);
}

#[test]
fn convergence_failure_exits_two() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "cv-avg",
            "--input",
            "cat",
            "--parity",
            "odd",
            "--alpha",
            "2.5i",
            "--kind",
            "subtracted",
            "--lambda",
            "0.9",
            "--order",
            "8",
        ],
        &[],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn help_and_version_exit_zero() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&run(tmp.path(), &["--help"], &[])), 0);
    assert_eq!(code(&run(tmp.path(), &["--version"], &[])), 0);
}

#[test]
fn ndps_curve_marks_undefined_fidelity() {
    let tmp = TempDir::new().unwrap();
    // The added resource always holds a photon, so vacuum input never yields k = 0.
    let o = run(
        tmp.path(),
        &["ndps-curve", "--k", "0", "--alpha", "0", "--lambdas", "0,0.5"],
        &[],
    );
    assert_eq!(code(&o), 0);
    let (_, rows) = read_csv(&tmp.path().join("ndps_curve.csv"));
    for row in &rows {
        assert_eq!(row[3], "");
        assert!(row[1].parse::<f64>().is_ok());
    }
}

#[test]
fn resource_stats_and_entropy_curve() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&run(tmp.path(), &["resource-stats", "--lambda", "0.8"], &[])), 0);
    let (_, rows) = read_csv(&tmp.path().join("resource_stats.csv"));
    let standard0 = rows.iter().find(|r| r[0] == "standard" && r[2] == "0").unwrap();
    assert!((standard0[3].parse::<f64>().unwrap() - 0.36).abs() < 1e-12);
    let summary = fs::read_to_string(tmp.path().join("resource_entropy_summary.csv")).unwrap();
    assert!(summary.contains("herald_valid,true"));

    assert_eq!(
        code(&run(
            tmp.path(),
            &["entropy-curve", "--lambdas", "0.1:0.9:0.1", "--base", "2"],
            &[]
        )),
        0
    );
    let path = tmp.path().join("entropy_curve.csv");
    let (s, p) = (column(&path, "standard"), column(&path, "subtracted"));
    assert!(s.iter().zip(&p).all(|(a, b)| b > a));
}

#[test]
fn oracle_check_passes() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["oracle-check", "--cases", "60"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let (_, rows) = read_csv(&tmp.path().join("oracle_check.csv"));
    assert_eq!(rows.len(), 60);
}

#[test]
fn reproduce_all_report_is_consistent() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["reproduce-all"], &[]);
    let (header, rows) = read_csv(&tmp.path().join("repro_report.csv"));
    assert_eq!(
        header,
        [
            "claim_id",
            "reference_value",
            "computed_value",
            "tolerance",
            "check",
            "pass"
        ]
    );
    let ids: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    for id in [
        "coherent.standard.fbar",
        "cat.odd.subtracted.fbar",
        "boundary.gap_argmax_lambda",
        "oracle.max_fidelity_diff",
    ] {
        assert!(ids.contains(&id), "{id}");
    }
    let failed = rows.iter().filter(|r| r[5] == "false").count();
    assert_eq!(code(&o), if failed == 0 { 0 } else { 4 });
    // Headline numbers the run must always reproduce.
    for id in [
        "coherent.standard.fbar",
        "coherent.subtracted.fbar",
        "cat.even.standard.fbar",
        "cat.even.subtracted.fbar",
    ] {
        assert_eq!(rows.iter().find(|r| r[0] == id).unwrap()[5], "true", "{id}");
    }
}
