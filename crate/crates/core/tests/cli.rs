use std::process::Command;

use polyzeta::cli::{self, EvalRecord, Report, Status};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("polyzeta").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn binary(args: &[&str], seed_env: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_polyzeta"));
    cmd.args(args).env_remove(cli::SEED_ENV);
    if let Some(seed) = seed_env {
        cmd.env(cli::SEED_ENV, seed);
    }
    let output = cmd.output().expect("binary runs");
    (
        output.status.code().unwrap(),
        String::from_utf8(output.stdout).unwrap(),
    )
}

#[test]
fn eval_series_value() {
    let (code, out, _) = run(&[
        "eval", "--k", "2", "--a", "2", "--method", "series", "--tol", "1e-10", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let rec: EvalRecord = serde_json::from_str(&out).unwrap();
    assert!((rec.value - 2.4674011003).abs() < 1e-9);
    assert!(rec.error_estimate <= 1e-10);
}

#[test]
fn eval_formula_k1() {
    let (code, out, _) = run(&[
        "eval", "--k", "1", "--a", "3", "--method", "formula", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let rec: EvalRecord = serde_json::from_str(&out).unwrap();
    assert!((rec.value - 1.2091995762).abs() < 1e-10);
    assert_eq!(rec.breakdown.as_deref(), Some(&[][..]));
}

#[test]
fn eval_invalid_k_exits_2() {
    let (code, out, err) = run(&["eval", "--k", "0", "--a", "2", "--method", "series"]);
    assert_eq!(code, cli::EXIT_INVALID);
    assert!(out.is_empty());
    assert!(err.contains("error"));
    assert_eq!(run(&["eval", "--k", "2", "--a", "1"]).0, cli::EXIT_INVALID);
    assert_eq!(
        run(&["eval", "--k", "7", "--a", "2", "--method", "formula"]).0,
        cli::EXIT_INVALID
    );
}

#[test]
fn verify_single_ok() {
    let (code, out, _) = run(&[
        "verify",
        "--k",
        "2",
        "--a",
        "2",
        "--samples",
        "100000",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{out}");
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.status, Status::Ok);
    assert_eq!(report.results.len(), 4);
    for r in &report.results {
        assert!((r.value - 2.4674011).abs() < 0.02, "{r:?}");
    }
    assert_eq!(report.agreement.len(), 6);
}

#[test]
fn verify_printed_constants_flags_mismatch() {
    let (code, out, _) = run(&[
        "verify",
        "--k",
        "2",
        "--a",
        "2",
        "--use-printed-constants",
        "--format",
        "json",
    ]);
    assert_eq!(code, cli::EXIT_TOLERANCE_EXCEEDED);
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.status, Status::ToleranceExceeded);
    let formula = report
        .results
        .iter()
        .find(|r| r.method == polyzeta::Method::PolytopeFormula)
        .unwrap();
    let expected =
        (std::f64::consts::PI / 2.0).powi(2) * (0.5 + std::f64::consts::PI.powi(2) / 8.0);
    assert!((formula.value - expected).abs() < 1e-8);
}

#[test]
fn verify_all_excludes_quad_above_k3() {
    let (code, out, _) = run(&["verify", "--all", "--samples", "20000", "--format", "json"]);
    assert_eq!(code, 0);
    let reports: Vec<Report> = serde_json::from_str(&out).unwrap();
    assert_eq!(reports.len(), 12);
    for r in &reports {
        assert_eq!(r.status, Status::Ok, "{}", r.spec);
        let has_quad = r
            .results
            .iter()
            .any(|x| x.method == polyzeta::Method::DirectQuad);
        assert_eq!(has_quad, r.spec.k <= 3);
    }
}

#[test]
fn enumerate_listings() {
    let (code, out, _) = run(&["enumerate", "--k", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("n=1: 4 tuples"));
    assert!(out.contains("n=2: 4 tuples"));
    assert_eq!(out.matches("alphas [2,0]").count(), 4);

    let (_, out, _) = run(&["enumerate", "--k", "2"]);
    assert!(out.contains("n=1: 2 tuples"));
    assert_eq!(out.matches("alphas [1]").count(), 2);

    let (_, out, _) = run(&["enumerate", "--k", "3", "--n", "1", "--format", "csv"]);
    assert_eq!(
        out,
        "n,tuple,alphas,free_exponent\n1,1,2,0\n1,2,2,0\n1,3,2,0\n"
    );

    assert_eq!(run(&["enumerate", "--k", "21"]).0, cli::EXIT_INVALID);
}

#[test]
fn cdf_examples() {
    assert_eq!(
        run(&["cdf", "--a", "2", "--t", "1", "--dist", "xi"]).1,
        "0.5\n"
    );
    assert_eq!(
        run(&["cdf", "--a", "7", "--t", "0", "--dist", "theta"]).1,
        "0\n"
    );
    assert_eq!(
        run(&["cdf", "--a", "2", "--t", "-0.5"]).0,
        cli::EXIT_INVALID
    );
}

#[test]
fn sample_is_deterministic() {
    let args = [
        "sample", "--a", "2", "--dist", "xi", "--n", "3", "--seed", "42",
    ];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let values: Vec<f64> = first.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!(values.iter().all(|&v| v > 0.0));
    assert_eq!(run(&args).1, first);
    assert_eq!(
        run(&["sample", "--a", "2", "--n", "0"]).0,
        cli::EXIT_INVALID
    );
}

#[test]
fn seed_flag_beats_environment() {
    let base = ["sample", "--a", "3", "--n", "4"];
    let (code, from_env) = binary(&base, Some("42"));
    assert_eq!(code, 0);
    let (_, from_flag) = binary(&[&base[..], &["--seed", "42"]].concat(), None);
    assert_eq!(from_env, from_flag);
    let (_, flag_wins) = binary(&[&base[..], &["--seed", "42"]].concat(), Some("7"));
    assert_eq!(flag_wins, from_flag);
    let (_, other) = binary(&base, Some("7"));
    assert_ne!(other, from_flag);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(binary(&["eval", "--k", "0", "--a", "2"], None).0, 2);
    assert_eq!(
        binary(
            &["verify", "--k", "2", "--a", "2", "--use-printed-constants"],
            None
        )
        .0,
        1
    );
}

#[test]
fn json_round_trips_exactly() {
    let (_, out, _) = run(&[
        "eval", "--k", "3", "--a", "3", "--method", "formula", "--format", "json",
    ]);
    let rec: EvalRecord = serde_json::from_str(&out).unwrap();
    let again = serde_json::to_string_pretty(&rec).unwrap();
    assert_eq!(again.trim_end(), out.trim_end());
    let back: EvalRecord = serde_json::from_str(&again).unwrap();
    assert_eq!(back.value.to_bits(), rec.value.to_bits());
    let rows = rec.breakdown.unwrap();
    assert_eq!(rows.len(), 3);
    assert!(out.contains("\"J\"") && out.contains("\"alphas\""));
}

#[test]
fn csv_quotes_multi_index_fields() {
    let (_, out, _) = run(&["enumerate", "--k", "4", "--n", "2", "--format", "csv"]);
    assert!(out.lines().nth(1).unwrap().starts_with("2,\"1,3\",\"2,0\""));
}
