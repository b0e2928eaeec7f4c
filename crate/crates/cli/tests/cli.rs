use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn spdmean(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_spdmean"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn spdmean");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn tmp(name: &str, contents: &[u8]) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn geometric_mean_of_four_and_nine() {
    let out = spdmean(
        &["mean", "--kind", "geometric"],
        r#"{"matrices": [[[4]], [[9]]]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((matrix(&v["result"])[0][0] - 6.0).abs() <= 1e-12);
    assert_eq!(v["diagnostics"]["kind"], "geometric");
}

#[test]
fn power_mean_at_one_is_the_arithmetic_mean() {
    let doc = spdmean(&["gen", "--dim", "3", "--count", "4", "--seed", "3"], "");
    let doc = String::from_utf8(doc.stdout).unwrap();
    let power = json(&spdmean(&["mean", "--kind", "power", "--t", "1"], &doc));
    let arith = json(&spdmean(&["mean", "--kind", "arithmetic"], &doc));
    let (p, a) = (matrix(&power["result"]), matrix(&arith["result"]));
    for (x, y) in p.iter().flatten().zip(a.iter().flatten()) {
        assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
    }
    assert!(power["diagnostics"]["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn every_mean_kind_runs() {
    let doc =
        r#"{"matrices": [[[2, 0.5], [0.5, 1]], [[1, 0], [0, 3]], [[1.5, -0.2], [-0.2, 0.8]]]}"#;
    for kind in ["arithmetic", "harmonic", "alm", "inductive", "karcher"] {
        let out = spdmean(&["mean", "--kind", kind], doc);
        assert_eq!(out.status.code(), Some(0), "{kind}");
        let v = json(&out);
        assert_eq!(matrix(&v["result"]).len(), 2);
        assert!(v["diagnostics"]["iterations"].is_u64());
    }
}

#[test]
fn karcher_axioms_pass_for_seed_42() {
    let out = spdmean(
        &[
            "axioms", "--mean", "karcher", "--seed", "42", "--trials", "20",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("mean="))
        .collect();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.ends_with("pass")), "{text}");
    for label in ["(P1)", "(P10)", "NPC", "AGM", "Yamazaki", "contractivity"] {
        assert!(text.contains(label), "{label}");
    }
}

#[test]
fn distances() {
    let doc = r#"{"matrices": [[[1]], [[7.38905609893065]], [[1]]]}"#;
    let v = json(&spdmean(&["dist", "--metric", "riemannian"], doc));
    let d = matrix(&v["result"]);
    assert!((d[0][1] - 2.0).abs() <= 1e-12);
    assert_eq!(d[0][2], 0.0);
    assert_eq!(d[1][0], d[0][1]);

    let other = tmp(
        "dist_other.json",
        br#"{"matrices": [[[7.38905609893065]]]}"#,
    );
    let out = spdmean(
        &[
            "dist",
            "--metric",
            "wasserstein",
            "--other",
            other.to_str().unwrap(),
        ],
        r#"{"matrices": [[[1]]]}"#,
    );
    assert!((json(&out)["result"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
}

#[test]
fn walk_traces() {
    let doc = r#"{"matrices": [[[1]], [[4]]]}"#;
    let out = spdmean(&["walk", "--steps", "20", "--seed", "1"], doc);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,m00");
    let steps: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(steps, ["1", "2", "5", "10", "20"]);

    let out = spdmean(
        &[
            "walk",
            "--steps",
            "4",
            "--deterministic",
            "--target",
            "karcher",
        ],
        doc,
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,distance");
    let last: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last <= 1e-12, "{last}");
}

#[test]
fn bench_trace() {
    let doc = r#"{"matrices": [[[1]], [[4]], [[9]]]}"#;
    let out = spdmean(&["bench", "--schedule", "1,0.5,0.1"], doc);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,gap");
    let gaps: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|g| g[1] <= g[0]));
}

#[test]
fn gen_round_trips_bit_exactly() {
    let out = spdmean(
        &[
            "gen", "--dim", "2", "--count", "3", "--seed", "9", "--spread", "1.5",
        ],
        "",
    );
    let v = json(&out);
    assert_eq!(v["metadata"]["seed"], 9);
    let path = tmp("gen_round_trip.json", &out.stdout);
    let back = spdmean(
        &[
            "gen", "--dim", "2", "--count", "3", "--seed", "9", "--spread", "1.5",
        ],
        "",
    );
    assert_eq!(out.stdout, back.stdout);
    let arith = spdmean(
        &[
            "mean",
            "--kind",
            "arithmetic",
            "--input",
            path.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(arith.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_one() {
    let out = spdmean(
        &["mean", "--kind", "karcher"],
        r#"{"matrices": [[[1, 2], [2, 1]]]}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("matrix 0") && err.contains("eigenvalue"),
        "{err}"
    );

    assert_eq!(
        spdmean(&["mean", "--kind", "karcher"], "{").status.code(),
        Some(1)
    );
    assert_eq!(
        spdmean(&["mean", "--kind", "median"], "").status.code(),
        Some(1)
    );
    assert_eq!(
        spdmean(&["mean", "--kind", "karcher", "--bogus"], "")
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spdmean(&["mean", "--kind", "power"], r#"{"matrices": [[[1]]]}"#)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spdmean(&["walk", "--steps", "5"], r#"{"matrices": [[[1]]]}"#)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spdmean(&["gen", "--dim", "2", "--count", "3"], "")
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spdmean(
            &["mean", "--kind", "alm"],
            r#"{"matrices": [[[1]], [[2]]], "weights": [0.3, 0.7]}"#
        )
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn solver_failures_exit_with_two() {
    let out = spdmean(
        &[
            "mean",
            "--kind",
            "karcher",
            "--max-iter",
            "1",
            "--tol",
            "1e-300",
        ],
        r#"{"matrices": [[[1, 0.3], [0.3, 2]], [[3, 0], [0, 1]], [[1, 0], [0, 5]]]}"#,
    );
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "solver");
    assert!(v["error"]["message"].as_str().unwrap().contains("converge"));
}

#[test]
fn help_exits_cleanly() {
    let out = spdmean(&["--help"], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("axioms"));
}
