//! Command-line front end: every library operation with file-based I/O
//! for batch analysis and report generation.
//!
//! Exit status: 0 success, 2 validation error (bad input files, bad
//! flags, size caps), 3 numerical failure (eigensolver non-convergence).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tracebound::bounds::{
    failure_per_bit, guessing_bound, kpa_counterexample, kpa_delta, markov_tail_bound,
    naive_ber_bound,
};
use tracebound::classical::{maximal_coupling, mixture_residual, Distribution, MixtureResidual};
use tracebound::quantum::{helstrom_correct_probability, trace_distance, DensityOperator};
use tracebound::sim::{analytic_expectation, simulate_rounds, Adversary, SimConfig};
use tracebound::Error;

#[derive(Parser)]
#[command(name = "tracebound", version, about = "Distance metrics, couplings and adversary bounds for key-distribution security criteria")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Normalization tolerance applied when parsing distributions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Statistical distance of two distributions, or trace distance of
    /// two density operators (detected from the file contents).
    Metrics {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Optimal binary discrimination probability with arbitrary priors.
    Helstrom {
        #[arg(long)]
        rho0: PathBuf,
        #[arg(long)]
        rho1: PathBuf,
        /// Prior of hypothesis 0; hypothesis 1 gets the complement.
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
    },
    /// Maximal coupling of two distributions.
    Coupling {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Peel a (1-lambda)-weighted component out of a distribution.
    Mixture {
        #[arg(long)]
        p_x: PathBuf,
        #[arg(long)]
        p_y: PathBuf,
        #[arg(long)]
        lam: f64,
        /// Also run the uniform-mixture feasibility bounds on p_x.
        #[arg(long)]
        bounds_check: bool,
    },
    /// Extremal distribution saturating the guessing bound 2^-n + d.
    Extremal {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: f64,
        /// Also write the constructed distribution to this file.
        #[arg(long)]
        dist_out: Option<PathBuf>,
    },
    /// Known-prefix counterexample distribution.
    Kpa {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        special_prefix: u64,
        #[arg(long, default_value_t = 0)]
        completion: u64,
        #[arg(long)]
        dist_out: Option<PathBuf>,
    },
    /// Security-bound arithmetic for a given n and d.
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: f64,
        /// Markov threshold; the average defaults to d.
        #[arg(long)]
        markov_threshold: Option<f64>,
        #[arg(long)]
        markov_average: Option<f64>,
        /// Include the failure-per-bit number over this many bits.
        #[arg(long)]
        total_bits: Option<f64>,
    },
    /// Monte Carlo multi-round leakage simulation.
    Simulate {
        /// JSON SimConfig file; flags below override nothing when given.
        #[arg(long, conflicts_with_all = ["rounds", "key_len", "d_level", "adversary", "threshold", "seed"])]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, default_value_t = 100_000)]
        key_len: u64,
        #[arg(long, default_value_t = 0.1)]
        d_level: f64,
        #[arg(long, default_value = "full-round-bernoulli")]
        adversary: String,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let report = dispatch(&cli)?;
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::validation(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(&report),
    };
    match &cli.out {
        Some(path) => fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Value, CliError> {
    match &cli.cmd {
        Cmd::Metrics { p, q } => run_metrics(p, q, cli.tol),
        Cmd::Helstrom { rho0, rho1, p0 } => {
            let r0 = read_operator(rho0)?;
            let r1 = read_operator(rho1)?;
            let pc = helstrom_correct_probability(&r0, &r1, *p0, 1.0 - *p0)?;
            Ok(json!({
                "correct_probability": pc,
                "p0": p0,
                "p1": 1.0 - p0,
            }))
        }
        Cmd::Coupling { p, q } => {
            let p = read_distribution(p, cli.tol)?;
            let q = read_distribution(q, cli.tol)?;
            let c = maximal_coupling(&p, &q)?;
            let delta = p.statistical_distance(&q)?;
            Ok(json!({
                "coupling": c,
                "equality_probability": c.equality_probability()?,
                "statistical_distance": delta,
            }))
        }
        Cmd::Mixture {
            p_x,
            p_y,
            lam,
            bounds_check,
        } => {
            let px = read_distribution(p_x, cli.tol)?;
            let py = read_distribution(p_y, cli.tol)?;
            let residual = mixture_residual(&px, &py, *lam)?;
            let mut report = match residual {
                MixtureResidual::Feasible(dist) => json!({
                    "feasible": true,
                    "lambda": lam,
                    "residual": dist,
                }),
                MixtureResidual::Infeasible { index, violation } => json!({
                    "feasible": false,
                    "lambda": lam,
                    "worst_violation": {"index": index, "value": violation},
                }),
            };
            if *bounds_check {
                let check = px.uniform_mixture_bounds_check(*lam)?;
                report["uniform_bounds_check"] =
                    serde_json::to_value(check).map_err(|e| CliError::validation(e.to_string()))?;
            }
            Ok(report)
        }
        Cmd::Extremal { n, d, dist_out } => {
            let dist = tracebound::bounds::extremal_guessing_distribution(*n, *d)?;
            let uniform = Distribution::uniform(dist.n_outcomes())?;
            let delta = dist.statistical_distance(&uniform)?;
            let guess = dist.guessing_probability();
            if let Some(path) = dist_out {
                write_json(path, &dist)?;
            }
            Ok(json!({
                "n": n,
                "d": d,
                "delta": delta,
                "guess_prob": guess,
                "bound": guessing_bound(*n, *d)?,
                "distribution": dist,
            }))
        }
        Cmd::Kpa {
            n,
            m,
            special_prefix,
            completion,
            dist_out,
        } => {
            let dist = kpa_counterexample(*n, *m, *special_prefix, *completion)?;
            let cond = dist.condition_on_prefix(*special_prefix, *m)?;
            if let Some(path) = dist_out {
                write_json(path, &dist)?;
            }
            Ok(json!({
                "n": n,
                "m": m,
                "special_prefix": special_prefix,
                "completion": completion,
                "delta": kpa_delta(*n, *m),
                "conditional_guessing_probability": cond.guessing_probability(),
                "distribution": dist,
            }))
        }
        Cmd::Bounds {
            n,
            d,
            markov_threshold,
            markov_average,
            total_bits,
        } => {
            let mut reports = vec![guessing_bound(*n, *d)?, naive_ber_bound(*d)?];
            if let Some(threshold) = markov_threshold {
                let average = markov_average.unwrap_or(*d);
                reports.push(markov_tail_bound(average, *threshold)?);
            }
            if let Some(bits) = total_bits {
                reports.push(failure_per_bit(*d, *bits)?.to_bound_report());
            }
            serde_json::to_value(reports).map_err(|e| CliError::validation(e.to_string()))
        }
        Cmd::Simulate {
            config,
            rounds,
            key_len,
            d_level,
            adversary,
            threshold,
            seed,
        } => {
            let cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    serde_json::from_str::<SimConfig>(&text)
                        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
                }
                None => SimConfig {
                    rounds: *rounds,
                    key_len: *key_len,
                    d_level: *d_level,
                    adversary: parse_adversary(adversary, *threshold)?,
                    seed: *seed,
                },
            };
            let report = simulate_rounds(&cfg)?;
            let expectation = analytic_expectation(&cfg)?;
            Ok(json!({
                "config": cfg,
                "report": report,
                "expectation": expectation,
            }))
        }
    }
}

fn parse_adversary(name: &str, threshold: Option<f64>) -> Result<Adversary, CliError> {
    match name {
        "full-round-bernoulli" => Ok(Adversary::FullRoundBernoulli),
        "per-round-threshold" => {
            let threshold = threshold.ok_or_else(|| {
                CliError::validation("--threshold is required for per-round-threshold")
            })?;
            Ok(Adversary::PerRoundThreshold { threshold })
        }
        other => Err(CliError::validation(format!(
            "unknown adversary '{other}' (expected full-round-bernoulli or per-round-threshold)"
        ))),
    }
}

fn run_metrics(p: &Path, q: &Path, tol: f64) -> Result<Value, CliError> {
    let p_text = fs::read_to_string(p)?;
    let p_value: Value = serde_json::from_str(&p_text)
        .map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?;
    if p_value.get("entries").is_some() {
        let rho0 = read_operator(p)?;
        let rho1 = read_operator(q)?;
        Ok(json!({ "trace_distance": trace_distance(&rho0, &rho1)? }))
    } else {
        let p = parse_distribution(&p_text, p, tol)?;
        let q = read_distribution(q, tol)?;
        Ok(json!({ "statistical_distance": p.statistical_distance(&q)? }))
    }
}

fn read_distribution(path: &Path, tol: f64) -> Result<Distribution, CliError> {
    let text = fs::read_to_string(path)?;
    parse_distribution(&text, path, tol)
}

fn parse_distribution(text: &str, path: &Path, tol: f64) -> Result<Distribution, CliError> {
    Distribution::from_json_str(text, tol)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn read_operator(path: &Path) -> Result<DensityOperator, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str::<DensityOperator>(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::validation(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

// --- CSV rendering ----------------------------------------------------------
// Nested reports flatten to dotted column names; a top-level array becomes
// one row per element over the union of columns.

fn render_csv(value: &Value) -> String {
    let rows: Vec<Vec<(String, String)>> = match value {
        Value::Array(items) => items.iter().map(|v| flatten("", v)).collect(),
        other => vec![flatten("", other)],
    };
    let mut columns = BTreeSet::new();
    for row in &rows {
        for (k, _) in row {
            columns.insert(k.clone());
        }
    }
    let columns: Vec<String> = columns.into_iter().collect();
    let mut out = String::new();
    out.push_str(
        &columns
            .iter()
            .map(|c| csv_escape(c))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| {
                row.iter()
                    .find(|(k, _)| k == c)
                    .map(|(_, v)| csv_escape(v))
                    .unwrap_or_default()
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn flatten(prefix: &str, value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into(prefix, value, &mut out);
    out
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |suffix: &str| {
        if prefix.is_empty() {
            suffix.to_string()
        } else {
            format!("{prefix}.{suffix}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(&key(&i.to_string()), v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
