mod common;

use common::*;

const TABLE1_GOLDEN: &str = include_str!("golden/table1.csv");
const TABLE2_GOLDEN: &str = include_str!("golden/table2.csv");

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn transmit_first_table_row() {
    let out = run(&[
        "transmit", "--r", "0.01", "--sigma", "0.53", "--strike", "2.40", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert!((v["T_wkb"].as_f64().unwrap() - 0.72696).abs() < 5e-5);
    assert!((v["T_exact"].as_f64().unwrap() - 0.731626).abs() < 5e-6);
    assert!((v["d"].as_f64().unwrap() - 4.8801).abs() < 5e-4);
}

#[test]
fn decay_at_zero_is_one() {
    let out = run(&[
        "decay", "--r", "0.03", "--sigma", "0.47", "--t", "0", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,sigma,t,lambda,decay"));
    assert!(lines.next().unwrap().ends_with(",1"));
}

#[test]
fn above_barrier_is_a_regime_error() {
    let out = run(&[
        "transmit", "--r", "0.2", "--sigma", "0.2", "--strike", "2.0",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("above-barrier"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn parameter_errors_name_the_flag() {
    let out = run(&["tables", "table1", "--strike", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--strike"));

    let out = run(&["lambda", "--sigma", "-1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sigma"), "{}", stderr(&out));

    let out = run(&["geometry", "--sigma", "0.5"]);
    assert_eq!(code(&out), 2, "clap usage errors also exit 2");
}

#[test]
fn geometry_worked_example() {
    let out = run(&[
        "geometry", "--r", "0.03", "--sigma", "0.47", "--strike", "2.4", "--format", "json",
    ]);
    let v = json(&out);
    assert!((v["lambda"].as_f64().unwrap() - 0.0638).abs() < 5e-5);
    assert!((v["S_r"].as_f64().unwrap() - 3.958).abs() < 5e-4);
    assert!((v["d"].as_f64().unwrap() - 1.558).abs() < 5e-4);
    assert_eq!(v["regime"], "range_bound");
}

#[test]
fn modes_list() {
    let out = run(&[
        "modes", "--r", "0.03", "--sigma", "0.47", "--strike", "2.4", "--count", "4", "--format",
        "json",
    ]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].get("value").is_none());
    assert!((rows[0]["amplitude"].as_f64().unwrap() - (2.0f64 / 2.4).sqrt()).abs() < 1e-12);
    let out = run(&["modes", "--sigma", "0.47", "--strike", "2.4", "--at", "3"]);
    assert_eq!(code(&out), 2, "outside the box");
}

#[test]
fn tables_match_golden_fixtures() {
    for (which, golden) in [("table1", TABLE1_GOLDEN), ("table2", TABLE2_GOLDEN)] {
        let out = run(&["tables", which, "--format", "csv"]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), golden, "{which}");
    }
}

#[test]
fn golden_fixtures_hold_oracle_values() {
    // Independent high-precision evaluation of the WKB exponent.
    let t1 = [72.696, 75.36, 79.219, 83.378, 87.526, 91.467, 95.019];
    let d1 = [4.8801, 2.7478, 1.8032, 1.2401, 0.8558, 0.5721, 0.3516];
    let t2 = [91.07, 87.526, 85.586, 84.521, 83.955, 83.689, 83.639];
    let d2 = [0.5326, 0.8558, 1.1496, 1.421, 1.6743, 1.9128, 2.0045];
    for (golden, ts, ds) in [(TABLE1_GOLDEN, t1, d1), (TABLE2_GOLDEN, t2, d2)] {
        let mut rdr = csv::Reader::from_reader(golden.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 7);
        for (i, row) in rows.iter().enumerate() {
            let t: f64 = row[3].parse().unwrap();
            let d: f64 = row[5].parse().unwrap();
            assert!((t * 100.0 - ts[i]).abs() < 5e-3, "row {i}: {t}");
            assert!((d - ds[i]).abs() < 5e-5, "row {i}: {d}");
        }
    }
}

#[test]
fn json_round_trips() {
    for args in [
        vec![
            "transmit", "--r", "0.03", "--sigma", "0.47", "--strike", "2.4",
        ],
        vec!["tables", "table2"],
        vec!["lambda", "--sigma", "0.53"],
    ] {
        let mut a = args.clone();
        a.extend(["--format", "json"]);
        let out = run(&a);
        let first = json(&out);
        let rendered = serde_json::to_string_pretty(&first).unwrap();
        let second: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        assert_eq!(first, second);
        assert_eq!(rendered.trim_end(), stdout(&out).trim_end());
    }
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"r": 0.05, "format": "csv"}"#).unwrap();

    let out = run(&[
        "lambda",
        "--sigma",
        "0.5",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out), "r,sigma,lambda\n0.05,0.5,0.1\n");

    let out = bin()
        .env("TUNNELGATE_CONFIG", &cfg)
        .args([
            "lambda", "--sigma", "0.5", "--r", "0.02", "--format", "json",
        ])
        .output()
        .unwrap();
    assert_eq!(json(&out)["r"], 0.02);

    std::fs::write(&cfg, r#"{"r": -1}"#).unwrap();
    let out = run(&[
        "lambda",
        "--sigma",
        "0.5",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    std::fs::write(&cfg, r#"{"rate": 0.1}"#).unwrap();
    let out = run(&[
        "lambda",
        "--sigma",
        "0.5",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn scan_lnkd_like_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let lnkd = &INSTRUMENTS[0];
    let path = write_csv(dir.path(), &fixture(lnkd));
    let out = run(&[
        "scan",
        path.to_str().unwrap(),
        "--sigma",
        "0.47",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = json(&out);
    let row = &rows[0];
    assert_eq!(row["symbol"], "LNKD");
    assert!((row["K"].as_f64().unwrap() - 3.9).abs() < 1e-9);
    assert!((row["d"].as_f64().unwrap() - 0.058114).abs() < 5e-7);
    assert!((row["T"].as_f64().unwrap() - 0.998675).abs() < 5e-4);
    assert!((row["vol_fall_before"].as_f64().unwrap() - 0.63).abs() < 1e-9);
    assert!((row["vol_fall_after"].as_f64().unwrap() - 0.39).abs() < 1e-9);
}

#[test]
fn scan_trending_directory_and_bad_files() {
    use tunnelgate::marketdata::synthetic::{self, Segment};
    let dir = tempfile::tempdir().unwrap();
    let up = synthetic::series("UP", &[Segment::free(60, 0.2, 50.0).with_drift(0.01)]);
    write_csv(dir.path(), &up);
    std::fs::write(dir.path().join("BAD.csv"), "date,open\n").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();

    let out = run(&["scan", dir.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2, "{text}");
    let row = text.lines().nth(1).unwrap();
    assert!(
        row.starts_with("UP,") && row.ends_with(",trending"),
        "{row}"
    );
    assert!(row.contains(",,,"), "T column empty: {row}");
    assert!(stderr(&out).contains("BAD.csv"));

    std::fs::remove_file(dir.path().join("UP.csv")).unwrap();
    let out = run(&["scan", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2, "all inputs failed");
}

#[test]
fn scan_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["scan", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no input"));
}

#[test]
fn verify_default_passes() {
    let out = run(&["verify", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(stderr(&out).contains("PASS pde_residual_convergence"));
}

#[test]
fn verify_negative_control() {
    let out = run(&[
        "verify",
        "--negative-control",
        "--samples",
        "10",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("pde_negative_control,true"));
}

#[test]
fn verify_impossible_tolerance() {
    let out = run(&["verify", "--quad-tol", "1e-15", "--sequential"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("tolerance not met"));
}
