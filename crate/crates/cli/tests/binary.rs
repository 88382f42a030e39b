use std::process::{Command, Output};

use serde_json::Value;

fn bshq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bshq")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn spectrum_examples() {
    let out = bshq(&["spectrum", "--nmax", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json(&out)["records"].as_array().unwrap().clone();
    assert_eq!(records.len(), 3);
    let r10 = records.iter().find(|r| r["m"] == 1 && r["n"] == 0).unwrap();
    assert_eq!((r10["E"].as_f64(), r10["L"].as_f64()), (Some(1.0), Some(1.0)));

    let zero = json(&bshq(&["spectrum", "--nmax", "0"]));
    let only = &zero["records"][0];
    assert_eq!(zero["records"].as_array().unwrap().len(), 1);
    for key in ["A1", "A2", "E", "L"] {
        assert_eq!(only[key].as_f64(), Some(0.0));
    }

    let csv = stdout(&bshq(&["spectrum", "--nmax", "2", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,n,A1,A2,E,L");
    assert_eq!(lines.len(), 7);
}

#[test]
fn verify_exit_codes() {
    let reduced = bshq(&["verify", "reduced", "--q", "5"]);
    assert_eq!(reduced.status.code(), Some(0));
    let report = json(&reduced);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"[Q+,Q−]=−4ħQ₃"));
    assert_eq!(report["config"]["scope"], "reduced");
    assert_eq!(report["summary"]["failed"], 0);

    let strict = bshq(&["verify", "oscillator", "--tol", "1e-20"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(json(&strict)["summary"]["failed"].as_u64().unwrap() > 0);

    let text = bshq(&["verify", "su2", "--format", "text"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).lines().all(|l| l.starts_with("PASS") || l.ends_with("0 failed")));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "everything"][..],
        &["spectrum", "--hbar", "0"],
        &["spectrum", "--tol", "-1"],
        &["spectrum", "--format", "yaml"],
        &["verify", "all", "--format", "csv"],
        &["bogus"],
    ] {
        let out = bshq(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(bshq(&["--help"]).status.code(), Some(0));
}

#[test]
fn bcoeff_rows() {
    let q2 = stdout(&bshq(&["bcoeff", "--q", "2", "--format", "csv"]));
    assert!(q2.starts_with("p,chain,b_sq,b,boundary\n"));
    let row0: Vec<&str> = q2.lines().find(|l| l.starts_with("0,")).unwrap().split(',').collect();
    assert_eq!(row0[1], "even");
    assert_eq!(row0[2].parse::<f64>().unwrap(), 8.0);
    assert_eq!(row0[3].parse::<f64>().unwrap(), 8f64.sqrt());

    let q3 = json(&bshq(&["bcoeff", "--q", "3"]));
    let row = q3["rows"].as_array().unwrap().iter().find(|r| r["p"] == 0).unwrap().clone();
    assert_eq!(row["chain"], "odd");
    assert_eq!(row["b_sq"].as_f64(), Some(8.0));

    let q0 = json(&bshq(&["bcoeff", "--q", "0"]));
    let rows = q0["rows"].as_array().unwrap();
    assert_eq!(rows.iter().filter(|r| r["boundary"] == false).count(), 0);
    assert!(rows.iter().all(|r| r["b_sq"].as_f64() == Some(0.0)));
    assert_eq!(rows[0]["p"], 0);

    let hbar = json(&bshq(&["bcoeff", "--q", "2", "--hbar", "0.5"]));
    let row = hbar["rows"].as_array().unwrap().iter().find(|r| r["p"] == 0).unwrap().clone();
    assert_eq!(row["b"].as_f64(), Some(0.5 * 8f64.sqrt()));
}

#[test]
fn multiplicity_rows() {
    let three = json(&bshq(&["multiplicity", "--nmax", "3"]));
    let rows = three["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let surplus: Vec<u64> = rows.iter().map(|r| r["dim_Hq1"].as_u64().unwrap()).collect();
    assert_eq!(surplus, [0, 1, 2, 3]);

    let zero = json(&bshq(&["multiplicity", "--nmax", "0"]));
    assert_eq!(zero["rows"].as_array().unwrap().len(), 1);
    assert_eq!(zero["rows"][0]["dim_Hq1"], 0);

    let text = stdout(&bshq(&["multiplicity", "--nmax", "2", "--format", "text"]));
    assert!(text.contains("H̃¹"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["verify", "all", "--nmax", "8", "--q", "8", "--seed", "42"][..],
        &["verify", "classical", "--seed", "7"],
        &["spectrum", "--nmax", "6", "--hbar", "0.7"],
        &["multiplicity", "--nmax", "6", "--format", "csv"],
    ] {
        let a = bshq(args);
        let b = bshq(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let seeded = json(&bshq(&["verify", "su2", "--seed", "99"]));
    assert_eq!(seeded["config"]["seed"], 99);
}
