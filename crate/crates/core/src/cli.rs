//! Command-line front end. `run` parses arguments, writes results to `out`
//! and diagnostics to `err`, and returns the process exit code:
//! 0 ok, 1 tolerance exceeded, 2 invalid parameters, 3 nonconvergence.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    count_admissible_subsets, enumerate_admissible_tuples, AdmissibleTuple,
};
use crate::error::Error;
use crate::monte_carlo::{estimate_S, sample_stream, McConfig};
use crate::params::{validate_spec, EvalResult, Method, QuadConfig, SeriesSpec};
use crate::quadrature::{
    assemble_formula_with, direct_i, ProbabilityBreakdown, TupleConstant, DIRECT_MAX_K,
    FORMULA_MAX_K,
};
use crate::series::{evaluate_series, MIN_SERIES_TOL};
use crate::special::{cdf, CdfValue, DistributionKind, Kind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE_EXCEEDED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "POLYZETA_SEED";
const DEFAULT_SEED: u64 = 20_231_115;

/// `(k, a)` cells run by `verify --all`.
pub const VERIFY_MATRIX: [(u32, u32); 12] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 2),
    (3, 3),
    (3, 4),
    (4, 2),
    (4, 3),
    (4, 4),
];

#[derive(Debug, Parser)]
#[command(
    name = "polyzeta",
    version,
    about = "Evaluate and cross-check S(k,a) = Σ_n (-1)^{nk}/(an+1)^k"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate S(k,a) with one method.
    Eval(EvalArgs),
    /// Evaluate S(k,a) with every applicable method and compare.
    Verify(VerifyArgs),
    /// List admissible index tuples with their exponents.
    Enumerate(EnumerateArgs),
    /// Evaluate ψ (xi) or φ (theta).
    Cdf(CdfArgs),
    /// Draw seeded samples of Ξ or Θ.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Series,
    Quad,
    Formula,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Xi,
    Theta,
}

impl From<DistArg> for Kind {
    fn from(d: DistArg) -> Kind {
        match d {
            DistArg::Xi => Kind::Xi,
            DistArg::Theta => Kind::Theta,
        }
    }
}

#[derive(Debug, Args)]
struct McArgs {
    /// Monte Carlo seed.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo trials per probability.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    a: u32,
    #[arg(long, value_enum, default_value = "series")]
    method: MethodArg,
    /// Target tolerance (series error bound or quadrature abs/rel tolerance).
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Use the per-variable constant (π/a)·sin(π/a) in the formula.
    #[arg(long)]
    use_printed_constants: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    k: Option<u32>,
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    a: Option<u32>,
    /// Run the built-in (k, a) matrix.
    #[arg(long)]
    all: bool,
    /// Agreement tolerance added to the combined error estimates.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    use_printed_constants: bool,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct CdfArgs {
    #[arg(long)]
    a: u32,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, value_enum, default_value = "xi")]
    dist: DistArg,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    a: u32,
    #[arg(long, value_enum, default_value = "xi")]
    dist: DistArg,
    #[arg(long)]
    n: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ToleranceExceeded,
    Error,
}

/// Row of the per-tuple breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub tuple: Vec<usize>,
    pub alphas: Vec<u32>,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// Output of `eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub k: u32,
    pub a: u32,
    pub method: Method,
    pub value: f64,
    pub error_estimate: f64,
    pub work: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown: Option<Vec<BreakdownRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub first: Method,
    pub second: Method,
    pub difference: f64,
    pub allowed: f64,
    pub ok: bool,
}

/// Output of `verify` for one `(k, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: SeriesSpec,
    pub results: Vec<EvalResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown: Option<Vec<BreakdownRow>>,
    pub agreement: Vec<Agreement>,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

fn breakdown_rows(b: &ProbabilityBreakdown) -> Vec<BreakdownRow> {
    b.contributions
        .iter()
        .map(|c| BreakdownRow {
            tuple: c.tuple.indices.clone(),
            alphas: c.tuple.alphas.clone(),
            j: c.j,
            k: c.k,
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. }
        | Error::DomainViolation(_)
        | Error::UnsupportedDimension { .. } => EXIT_INVALID,
        Error::NonConvergence { .. }
        | Error::NonFinite { .. }
        | Error::RootSearch { .. }
        | Error::ToleranceUnachievable { .. } => EXIT_NONCONVERGENCE,
    }
}

/// Failure of a subcommand: an exit code plus a message for stderr.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(exit_code(&e), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_INVALID, format!("write failed: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure(EXIT_INVALID, format!("csv output failed: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(EXIT_INVALID, format!("json output failed: {e}"))
    }
}

type CmdResult = Result<i32, Failure>;

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Enumerate(args) => cmd_enumerate(&args, out),
        Command::Cdf(args) => cmd_cdf(&args, out),
        Command::Sample(args) => cmd_sample(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn quad_config(tol: f64) -> Result<QuadConfig, Error> {
    QuadConfig::with_tol(tol)
}

fn tuple_constant(printed: bool) -> TupleConstant {
    if printed {
        TupleConstant::Printed
    } else {
        TupleConstant::Density
    }
}

const DEFAULT_EVAL_SAMPLES: u64 = 1_000_000;
const DEFAULT_VERIFY_SAMPLES: u64 = 200_000;

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CmdResult {
    let spec = SeriesSpec {
        k: args.k,
        a: args.a,
    };
    validate_spec(&spec)?;
    if args.use_printed_constants && args.method != MethodArg::Formula {
        return Err(Failure(
            EXIT_INVALID,
            "--use-printed-constants applies to --method formula only".into(),
        ));
    }
    let mut breakdown = None;
    let result = match args.method {
        MethodArg::Series => evaluate_series(&spec, args.tol.unwrap_or(1e-12))?,
        MethodArg::Quad => direct_i(&spec, &quad_config(args.tol.unwrap_or(1e-9))?)?,
        MethodArg::Formula => {
            let b = assemble_formula_with(
                &spec,
                &quad_config(args.tol.unwrap_or(1e-9))?,
                tuple_constant(args.use_printed_constants),
            )?;
            breakdown = Some(breakdown_rows(&b));
            b.to_eval_result()
        }
        MethodArg::Mc => {
            let cfg = McConfig::new(
                args.mc.seed,
                args.mc.samples.unwrap_or(DEFAULT_EVAL_SAMPLES),
            );
            estimate_S(&spec, &cfg)?.to_eval_result()
        }
    };
    let record = EvalRecord {
        k: spec.k,
        a: spec.a,
        method: result.method,
        value: result.value,
        error_estimate: result.error_estimate,
        work: result.work,
        breakdown,
    };
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &record)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["k", "a", "method", "value", "error_estimate", "work"])?;
            write_result_row(&mut w, &spec, &result)?;
            w.flush()?;
        }
        Format::Table => {
            writeln!(out, "{spec}  method={}", result.method)?;
            writeln!(out, "value           {}", significant(result.value))?;
            writeln!(out, "error_estimate  {:.3e}", result.error_estimate)?;
            writeln!(out, "work            {}", result.work)?;
            if let Some(rows) = record.breakdown.as_ref().filter(|r| !r.is_empty()) {
                write_breakdown_table(out, rows)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn write_result_row<W: Write>(
    w: &mut csv::Writer<W>,
    spec: &SeriesSpec,
    r: &EvalResult,
) -> Result<(), csv::Error> {
    w.write_record([
        spec.k.to_string(),
        spec.a.to_string(),
        r.method.to_string(),
        r.value.to_string(),
        format!("{:e}", r.error_estimate),
        r.work.to_string(),
    ])
}

fn write_breakdown_table(out: &mut dyn Write, rows: &[BreakdownRow]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<16} {:<12} {:>22} {:>22}",
        "tuple", "alphas", "J", "K"
    )?;
    for row in rows {
        writeln!(
            out,
            "{:<16} {:<12} {:>22.15e} {:>22.15e}",
            format!("{:?}", row.tuple),
            format!("{:?}", row.alphas),
            row.j,
            row.k
        )?;
    }
    Ok(())
}

/// Margin a result contributes to a pairwise comparison: its error
/// estimate, or four standard errors for Monte Carlo.
fn margin(r: &EvalResult) -> f64 {
    match r.method {
        Method::MonteCarlo => 4.0 * r.error_estimate,
        _ => r.error_estimate,
    }
}

/// Run every applicable method for `spec` and compare all pairs.
pub fn verify_spec(spec: &SeriesSpec, tol: f64, mc: &McConfig, constant: TupleConstant) -> Report {
    let mut results = Vec::new();
    let mut errors = Vec::new();
    let mut breakdown = None;

    let quad_tol = (tol * 1e-3).max(1e-12);
    let mut push = |r: Result<EvalResult, Error>, errors: &mut Vec<String>| match r {
        Ok(r) => results.push(r),
        Err(e) => errors.push(e.to_string()),
    };

    push(
        evaluate_series(spec, (tol * 1e-3).max(MIN_SERIES_TOL)),
        &mut errors,
    );
    if spec.k <= DIRECT_MAX_K {
        push(
            quad_config(quad_tol).and_then(|c| direct_i(spec, &c)),
            &mut errors,
        );
    }
    if spec.k <= FORMULA_MAX_K {
        let b = quad_config(quad_tol).and_then(|c| assemble_formula_with(spec, &c, constant));
        push(
            b.map(|b| {
                breakdown = Some(breakdown_rows(&b));
                b.to_eval_result()
            }),
            &mut errors,
        );
    }
    push(
        estimate_S(spec, mc).map(|m| m.to_eval_result()),
        &mut errors,
    );

    let mut agreement = Vec::new();
    for (i, first) in results.iter().enumerate() {
        for second in &results[i + 1..] {
            let difference = (first.value - second.value).abs();
            let allowed = tol + margin(first) + margin(second);
            agreement.push(Agreement {
                first: first.method,
                second: second.method,
                difference,
                allowed,
                ok: difference <= allowed,
            });
        }
    }
    let status = if !errors.is_empty() {
        Status::Error
    } else if agreement.iter().all(|a| a.ok) {
        Status::Ok
    } else {
        Status::ToleranceExceeded
    };
    Report {
        spec: *spec,
        results,
        breakdown,
        agreement,
        status,
        errors,
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Error::invalid("tol", "must be positive").into());
    }
    if args.all && args.use_printed_constants {
        return Err(Failure(
            EXIT_INVALID,
            "--use-printed-constants is a diagnostic for a single (k, a), not --all".into(),
        ));
    }
    let specs: Vec<SeriesSpec> = if args.all {
        VERIFY_MATRIX
            .iter()
            .map(|&(k, a)| SeriesSpec { k, a })
            .collect()
    } else {
        // clap guarantees both are present without --all
        let spec = SeriesSpec {
            k: args.k.unwrap_or(0),
            a: args.a.unwrap_or(0),
        };
        validate_spec(&spec)?;
        vec![spec]
    };
    let mc = McConfig::new(
        args.mc.seed,
        args.mc.samples.unwrap_or(DEFAULT_VERIFY_SAMPLES),
    );
    let constant = tuple_constant(args.use_printed_constants);
    let reports: Vec<Report> = specs
        .iter()
        .map(|s| verify_spec(s, args.tol, &mc, constant))
        .collect();

    match args.format {
        Format::Json => {
            if args.all {
                serde_json::to_writer_pretty(&mut *out, &reports)?;
            } else {
                serde_json::to_writer_pretty(&mut *out, &reports[0])?;
            }
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["k", "a", "method", "value", "error_estimate", "work"])?;
            for r in &reports {
                for res in &r.results {
                    write_result_row(&mut w, &r.spec, res)?;
                }
            }
            w.flush()?;
        }
        Format::Table => {
            for r in &reports {
                write_report_table(out, r)?;
            }
        }
    }

    let code = if reports.iter().any(|r| r.status == Status::Error) {
        if reports
            .iter()
            .flat_map(|r| r.errors.iter())
            .any(|e| e.contains("invalid"))
        {
            EXIT_INVALID
        } else {
            EXIT_NONCONVERGENCE
        }
    } else if reports
        .iter()
        .any(|r| r.status == Status::ToleranceExceeded)
    {
        EXIT_TOLERANCE_EXCEEDED
    } else {
        EXIT_OK
    };
    Ok(code)
}

fn write_report_table(out: &mut dyn Write, r: &Report) -> std::io::Result<()> {
    let status = match r.status {
        Status::Ok => "ok",
        Status::ToleranceExceeded => "tolerance_exceeded",
        Status::Error => "error",
    };
    writeln!(out, "{}  status={status}", r.spec)?;
    for res in &r.results {
        writeln!(
            out,
            "  {:<17} {:>20.15} ± {:.2e}  (work {})",
            res.method.as_str(),
            res.value,
            res.error_estimate,
            res.work
        )?;
    }
    for a in r.agreement.iter().filter(|a| !a.ok) {
        writeln!(
            out,
            "  MISMATCH {} vs {}: |Δ| = {:.3e} > {:.3e}",
            a.first, a.second, a.difference, a.allowed
        )?;
    }
    for e in &r.errors {
        writeln!(out, "  error: {e}")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EnumerateRecord<'a> {
    n: usize,
    tuple: &'a [usize],
    alphas: &'a [u32],
    free_exponent: u32,
}

fn cmd_enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> CmdResult {
    if !(2..=20).contains(&args.k) {
        return Err(Error::invalid("k", format!("must lie in 2..=20, got {}", args.k)).into());
    }
    let sizes: Vec<usize> = match args.n {
        Some(n) => vec![n],
        None => (1..=args.k / 2).collect(),
    };
    let mut groups: Vec<(usize, Vec<AdmissibleTuple>)> = Vec::new();
    for n in sizes {
        let tuples = enumerate_admissible_tuples(args.k, n)?;
        let subsets = count_admissible_subsets(args.k, n)?;
        let factorial: u64 = (1..=n as u64).product();
        if tuples.len() as u64 != subsets * factorial {
            return Err(Failure(
                EXIT_NONCONVERGENCE,
                format!("n={n}: {} tuples but {subsets} subsets", tuples.len()),
            ));
        }
        groups.push((n, tuples));
    }
    match args.format {
        Format::Json => {
            let records: Vec<EnumerateRecord> = groups
                .iter()
                .flat_map(|(n, ts)| {
                    ts.iter().map(move |t| EnumerateRecord {
                        n: *n,
                        tuple: &t.indices,
                        alphas: &t.alphas,
                        free_exponent: t.free_exponent(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &records)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "tuple", "alphas", "free_exponent"])?;
            for (n, ts) in &groups {
                for t in ts {
                    w.write_record([
                        n.to_string(),
                        join(&t.indices),
                        join(&t.alphas),
                        t.free_exponent().to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        Format::Table => {
            for (n, ts) in &groups {
                writeln!(out, "n={n}: {} tuples", ts.len())?;
                for t in ts {
                    writeln!(
                        out,
                        "  ({})  alphas [{}]  free {}",
                        join(&t.indices),
                        join(&t.alphas),
                        t.free_exponent()
                    )?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// Shortest decimal form of `x` after rounding to 15 significant digits.
fn significant(x: f64) -> String {
    format!("{x:.14e}").parse::<f64>().unwrap_or(x).to_string()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_cdf(args: &CdfArgs, out: &mut dyn Write) -> CmdResult {
    let d = DistributionKind::new(args.dist.into(), args.a)?;
    let value = CdfValue {
        t: args.t,
        u: cdf(d, args.t)?,
    };
    match args.format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &value)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["t", "u"])?;
            w.write_record([value.t.to_string(), value.u.to_string()])?;
            w.flush()?;
        }
        Format::Table => writeln!(out, "{}", significant(value.u))?,
    }
    Ok(EXIT_OK)
}

fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> CmdResult {
    if args.n < 1 {
        return Err(Error::invalid("n", "must be >= 1").into());
    }
    let d = DistributionKind::new(args.dist.into(), args.a)?;
    for x in sample_stream(d, args.n, args.seed)? {
        writeln!(out, "{x}")?;
    }
    Ok(EXIT_OK)
}
