//! End-to-end runs of the `copula-concord` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copula-concord"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn first_number(s: &str) -> f64 {
    s.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn eval() {
    assert_eq!(
        stdout(&["eval", "lower:0.4,0.6,0.1", "0.4", "0.6"]),
        "0.1\n"
    );
    assert_eq!(stdout(&["eval", "pi", "0.5", "0.5"]), "0.25\n");
    let out = run(&["eval", "lower:0.4,0.6,0.5", "0.1", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds min{a, b, 1-a, 1-b}"));
    assert_eq!(code(&["eval", "m", "1.5", "0.2"]), 2);
    assert_eq!(code(&["eval", "clayton", "0.5", "0.5"]), 2);
}

#[test]
fn measure() {
    assert_eq!(
        first_number(&stdout(&["measure", "beta", "upper:0.4,0.6,0.1"])),
        0.6
    );
    let tau = stdout(&[
        "measure",
        "tau",
        "m",
        "--mode",
        "checkerboard",
        "--n",
        "256",
    ]);
    assert!((first_number(&tau) - 1.0).abs() <= 4.0 / 256.0);
    assert!(tau.contains("mode=checkerboard(256)"));
    let rho = stdout(&["measure", "rho", "lower:0.2,0.8,0.2", "--mode", "closed"]);
    assert!((first_number(&rho) + 0.904).abs() <= 1e-14);
    let seg = stdout(&["measure", "rho", "lower:0.2,0.8,0.2", "--mode", "segments"]);
    assert!((first_number(&seg) + 0.904).abs() <= 1e-8);
    assert_eq!(code(&["measure", "kendall", "pi"]), 2);
    assert_eq!(code(&["measure", "rho", "pi", "--mode", "fast"]), 2);
}

#[test]
fn region() {
    let out = stdout(&["region", "rho", "0.3333333333"]);
    let inner = out.trim().trim_start_matches('(').trim_end_matches(')');
    let (g, h) = inner.split_once(", ").unwrap();
    assert!((g.parse::<f64>().unwrap() + 5.0 / 9.0).abs() < 1e-8);
    assert!((h.parse::<f64>().unwrap() + 1.0 / 3.0).abs() < 1e-8);
    assert_eq!(stdout(&["region", "phi", "0"]), "(-0.5, 1)\n");
    assert_eq!(code(&["region", "tau", "0.4"]), 2);
    assert_eq!(code(&["region", "tau", "-0.1"]), 2);
}

#[test]
fn region_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.csv");
    stdout(&[
        "region",
        "gamma",
        "--curve",
        "--resolution",
        "333",
        "--out",
        path.to_str().unwrap(),
    ]);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["m", "lower", "upper"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 334);
    assert_eq!(rows[0], vec![0.0, -1.0, 1.0]);
    let last = &rows[333];
    assert!((last[0] - 1.0 / 3.0).abs() < 1e-15);
    assert!((last[1] + 4.0 / 9.0).abs() < 1e-14 && (last[2] + 1.0 / 3.0).abs() < 1e-14);
    // h(m) has breakpoints at 1/6, 1/5 and 1/4 but is continuous
    for pair in rows.windows(2) {
        assert!((pair[1][2] - pair[0][2]).abs() < 0.05);
        assert!(pair[1][1] >= pair[0][1] && pair[1][2] <= pair[0][2]);
    }
}

#[test]
fn inverse() {
    assert_eq!(stdout(&["inverse", "beta", "0"]), "0.25\n");
    assert_eq!(stdout(&["inverse", "tau", "1"]), "0\n");
    assert_eq!(stdout(&["inverse", "gamma", "-0.75"]), "0.25\n");
    assert_eq!(code(&["inverse", "rho", "1.5"]), 2);
    assert_eq!(code(&["inverse", "rho"]), 2);
}

#[test]
fn scan() {
    let rho = stdout(&["scan", "rho", "0.2", "--n", "64"]);
    assert_eq!(
        rho.lines().next(),
        Some("min: segment UT; max: segment RU; table: PASS")
    );
    let beta = stdout(&["scan", "beta", "0.2", "--n", "64"]);
    assert_eq!(
        beta.lines().next(),
        Some("min: point T; max: point R; table: PASS")
    );
    assert_eq!(code(&["scan", "tau", "0.0", "--n", "64"]), 2);
}

#[test]
fn verify() {
    let out = stdout(&["verify", "--suite", "relations"]);
    assert!(out.contains("seed = 42"));
    assert!(out.trim_end().ends_with("0 failed"));
    let prop41 = stdout(&["verify", "--suite", "prop41", "--n", "256"]);
    assert!(prop41.lines().filter(|l| l.starts_with("[PASS]")).count() >= 8);
    assert_eq!(code(&["verify", "--suite", "everything"]), 2);
}

#[test]
fn verify_all_is_deterministic_across_thread_counts() {
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_copula-concord"))
            .args(["verify", "--suite", "all", "--seed", "42", "--n", "64"])
            .env("COPULA_CONCORD_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, auto) = (run_with("1"), run_with("0"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, auto.stdout);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["eval", "pi", "0.5"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["measure", "rho", "pi", "--bogus"]), 2);
    assert_eq!(code(&["--help"]), 0);
}
