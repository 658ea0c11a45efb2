//! `dyck`: command-line front end for optimal matchings on the line and the
//! statistics of their entropy.

mod io;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyck_entropy::asymptotics::{
    bridge_variance_exact, convergence_report, predicted_constants, variance_quadrature,
};
use dyck_entropy::counting::{exact_moment, gf_moment_series, tn_count, Method};
use dyck_entropy::matching::{self, cost, count_optimal, h_lb};
use dyck_entropy::oracle::{verify_random_instances, DEFAULT_TIE_TOL};
use dyck_entropy::paths::to_canonical_instance;
use dyck_entropy::sampling::{rescaled_samples, SampleStats, DEFAULT_BINS};
use dyck_entropy::{Ensemble, Error};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::json;

use crate::io::{count_json, emit, fmt_f64, fmt_opt, parse_sizes, read_path, write_atomic};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or a failed check; exit status 1.
    Validation(String),
    /// A broken internal invariant; exit status 2.
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dyck",
    version,
    about = "Optimal matchings of the one-dimensional linear-cost assignment problem and the entropy of their number"
)]
struct Cli {
    /// Worker threads (default: all logical cores)
    #[arg(long, global = true, env = "DYCK_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PathArgs {
    /// Color ordering as U/D text (U = white) or a JSON array of +1/-1
    #[arg(long, conflicts_with = "instance")]
    path: Option<String>,

    /// Two-column CSV file of points: color (w/b), coordinate
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Bridge,
    Excursion,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Bridge => Ensemble::Bridge,
            EnsembleArg::Excursion => Ensemble::Excursion,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Dp,
    Closed,
    Gf,
    Brute,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dp => Method::Dp,
            MethodArg::Closed => Method::ClosedForm,
            MethodArg::Gf => Method::GfSeries,
            MethodArg::Brute => Method::Brute,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One optimal matching, its cost and the lower bound
    Solve {
        #[command(flatten)]
        input: PathArgs,
    },
    /// Number Z of optimal matchings and the entropy S = log Z
    Count {
        #[command(flatten)]
        input: PathArgs,
    },
    /// The m-th optimal matching, or all of them as JSON lines
    Enumerate {
        #[command(flatten)]
        input: PathArgs,
        /// 1-based index of a single matching
        #[arg(long)]
        index: Option<String>,
        /// Stop after this many matchings when listing
        #[arg(long)]
        limit: Option<u64>,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force cross-checks
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Exact moments of S over bridges or excursions
    Moments {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        /// Moment order, 1 or 2
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Sizes: a list (2,4,8), an inclusive range (10..50) or a stepped range (10..50:10)
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value = "dp")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares generating-function coefficients with T_N times the exact moments
    Gfcheck {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        /// Moment order, 1 or 2
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Largest N checked
        #[arg(long, default_value_t = 50)]
        order: usize,
        /// Largest accepted relative error
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo statistics of the rescaled entropy s = (S - N log N / 2) / N
    Sample {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long)]
        n: usize,
        /// Number of sampled paths
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Histogram bins
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Output file for the JSON summary (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV file receiving every sampled s
        #[arg(long)]
        dump_raw: Option<PathBuf>,
    },
    /// Limiting constants: consistency checks and convergence tables
    Asymptotics {
        /// Run the quadrature and constant consistency checks
        #[arg(long, required_unless_present = "report")]
        check: bool,
        /// Emit a convergence table of exact moments against the constants
        #[arg(long, requires_all = ["ensemble", "n_list"])]
        report: bool,
        #[arg(long, value_enum)]
        ensemble: Option<EnsembleArg>,
        /// Moment order, 1 or 2
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Sizes, same syntax as for `moments --n`
        #[arg(long)]
        n_list: Option<String>,
        #[arg(long, value_enum, default_value = "dp")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleAction {
    /// Product formula and enumerator against exhaustive search on random instances
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Relative tolerance for cost ties
        #[arg(long, default_value_t = DEFAULT_TIE_TOL)]
        tol: f64,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn json_line(value: &serde_json::Value) -> Result<String, CliError> {
    serde_json::to_string(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Solve { input } => solve(&input),
        Command::Count { input } => count(&input),
        Command::Enumerate {
            input,
            index,
            limit,
            out,
        } => enumerate(&input, index.as_deref(), limit, out),
        Command::Oracle {
            action:
                OracleAction::Verify {
                    n,
                    instances,
                    seed,
                    tol,
                    out,
                },
        } => {
            let report = verify_random_instances(n, instances, seed, tol)?;
            emit(out.as_deref(), &pretty(&report)?)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "{} of {} instances disagree with the exhaustive search",
                    report.failures.len(),
                    report.checked
                )))
            }
        }
        Command::Moments {
            ensemble,
            k,
            n,
            method,
            format,
            out,
        } => moments(ensemble.into(), k, &n, method.into(), format, out),
        Command::Gfcheck {
            ensemble,
            k,
            order,
            tol,
            out,
        } => gfcheck(ensemble.into(), k, order, tol, out),
        Command::Sample {
            ensemble,
            n,
            samples,
            seed,
            bins,
            out,
            dump_raw,
        } => {
            let values = rescaled_samples(n, ensemble.into(), samples, seed)?;
            let stats = SampleStats::from_values(n, ensemble.into(), seed, &values, bins)?;
            if let Some(raw) = dump_raw {
                let mut csv = String::from("index,s\n");
                for (i, v) in values.iter().enumerate() {
                    let _ = writeln!(csv, "{i},{}", fmt_f64(*v));
                }
                write_atomic(&raw, csv.as_bytes())?;
            }
            emit(out.as_deref(), &pretty(&stats)?)
        }
        Command::Asymptotics {
            check,
            report,
            ensemble,
            k,
            n_list,
            method,
            format,
            out,
        } => {
            if check {
                asymptotics_check()?;
            }
            if report {
                let ensemble = ensemble.expect("required by clap").into();
                let ns = parse_sizes(n_list.as_deref().expect("required by clap"))?;
                let table = convergence_report(&ns, ensemble, k, method.into())?;
                let text = match format {
                    Format::Json => pretty(&table)?,
                    Format::Csv => {
                        let mut csv = String::from("N,ensemble,k,rescaled_moment,predicted,deviation,normalized_deviation\n");
                        for r in &table.rows {
                            let _ = writeln!(
                                csv,
                                "{},{},{},{},{},{},{}",
                                r.n,
                                ensemble,
                                k,
                                fmt_f64(r.rescaled),
                                fmt_f64(r.predicted),
                                fmt_f64(r.deviation),
                                fmt_f64(r.normalized)
                            );
                        }
                        csv
                    }
                };
                emit(out.as_deref(), &text)?;
                if table.flagged {
                    eprintln!("warning: normalized deviation not bounded over the top decade of N");
                }
            }
            Ok(())
        }
    }
}

fn solve(input: &PathArgs) -> Result<(), CliError> {
    let input = read_path(input.path.as_deref(), input.instance.as_deref())?;
    let family = count_optimal(&input.path)?;
    let instance = match input.instance {
        Some(i) => i,
        None => to_canonical_instance(&input.path)?,
    };
    let first = family
        .iter()
        .next()
        .ok_or_else(|| CliError::Internal("empty optimal family".into()))?;
    if !matching::is_optimal(&input.path, &first)? {
        return Err(CliError::Internal("decoded matching fails the stack test".into()));
    }
    let value = json!({
        "N": input.path.size(),
        "path": input.path.to_string(),
        "matching": first,
        "cost": cost(&instance, &first)?,
        "lower_bound": h_lb(&instance),
        "Z": count_json(&family.count),
        "S": family.entropy(),
    });
    emit(None, &json_line(&value)?)
}

fn count(input: &PathArgs) -> Result<(), CliError> {
    let input = read_path(input.path.as_deref(), input.instance.as_deref())?;
    let family = count_optimal(&input.path)?;
    let value = json!({
        "N": input.path.size(),
        "Z": count_json(&family.count),
        "S": family.entropy(),
        "radices": family.radices,
        "max_stack": family.max_stack(),
    });
    emit(None, &json_line(&value)?)
}

fn enumerate(input: &PathArgs, index: Option<&str>, limit: Option<u64>, out: Option<PathBuf>) -> Result<(), CliError> {
    let input = read_path(input.path.as_deref(), input.instance.as_deref())?;
    let family = count_optimal(&input.path)?;
    let text = match index {
        Some(text) => {
            let m: BigUint = text
                .parse()
                .map_err(|_| CliError::Validation(format!("invalid index '{text}'")))?;
            let matching = family.decode(&m)?;
            json_line(&json!({ "index": count_json(&m), "matching": matching }))?
        }
        None => {
            let mut lines = String::new();
            let cap = limit.map_or(usize::MAX, |l| usize::try_from(l).unwrap_or(usize::MAX));
            for m in family.iter().take(cap) {
                lines.push_str(&json_line(&json!(m))?);
            }
            lines
        }
    };
    emit(out.as_deref(), &text)
}

fn moments(
    ensemble: Ensemble,
    k: u32,
    sizes: &str,
    method: Method,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let ns = parse_sizes(sizes)?;
    let results = ns
        .iter()
        .map(|&n| exact_moment(n, ensemble, k, method))
        .collect::<dyck_entropy::Result<Vec<_>>>()?;
    let text = match format {
        Format::Json => pretty(&results)?,
        Format::Csv => {
            let mut csv = String::from("N,ensemble,k,raw_moment,rescaled_moment,method\n");
            for r in &results {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.ensemble,
                    r.k,
                    fmt_f64(r.value),
                    fmt_opt(r.rescaled),
                    r.method
                );
            }
            csv
        }
    };
    emit(out.as_deref(), &text)
}

fn gfcheck(ensemble: Ensemble, k: u32, order: usize, tol: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    let series = gf_moment_series(ensemble, k, order)?;
    let mut csv = String::from("N,ensemble,k,gf_coefficient,count_times_moment,relative_error\n");
    let mut worst = 0.0f64;
    for n in 0..=order {
        let moment = exact_moment(n, ensemble, k, Method::Dp)?.value;
        let total = tn_count(n, ensemble)
            .to_f64()
            .ok_or_else(|| CliError::Internal("path count does not fit a float".into()))?;
        let expected = total * moment;
        let got = series.coeff(n);
        let rel = if expected == 0.0 {
            got.abs()
        } else {
            ((got - expected) / expected).abs()
        };
        worst = worst.max(rel);
        let _ = writeln!(
            csv,
            "{n},{ensemble},{k},{},{},{}",
            fmt_f64(got),
            fmt_f64(expected),
            fmt_f64(rel)
        );
    }
    emit(out.as_deref(), &csv)?;
    if worst > tol {
        return Err(CliError::Validation(format!(
            "largest relative error {worst:e} exceeds {tol:e}"
        )));
    }
    Ok(())
}

fn asymptotics_check() -> Result<(), CliError> {
    const TOL: f64 = 1e-9;
    let mut failed = Vec::new();
    let mut line = |name: &str, ok: bool, detail: String| {
        println!("{name}: {} ({detail})", if ok { "ok" } else { "FAILED" });
        if !ok {
            failed.push(name.to_string());
        }
    };
    let q = variance_quadrature()?;
    let exact = bridge_variance_exact();
    line(
        "variance integral",
        (q - exact).abs() <= TOL,
        format!("{q:.15} vs 1/3 - pi^2/72 = {exact:.15}"),
    );
    let m1 = predicted_constants(Ensemble::Bridge, 1)?;
    let m2 = predicted_constants(Ensemble::Bridge, 2)?;
    line(
        "bridge variance from constants",
        (m2 - m1 * m1 - q).abs() <= TOL,
        format!("<s^2> - <s>^2 = {:.15}", m2 - m1 * m1),
    );
    for ensemble in [Ensemble::Bridge, Ensemble::Excursion] {
        for k in 1..=2 {
            let a = predicted_constants(ensemble, k)?;
            let b = predicted_constants(ensemble, k)?;
            line(
                &format!("{ensemble} constant k={k}"),
                a.to_bits() == b.to_bits() && a.is_finite(),
                format!("{a:.15}"),
            );
        }
    }
    let e2 = predicted_constants(Ensemble::Excursion, 2)?;
    let e1 = predicted_constants(Ensemble::Excursion, 1)?;
    line(
        "excursion variance positive",
        e2 - e1 * e1 > 0.0,
        format!("{:.15}", e2 - e1 * e1),
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("failed checks: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (kind, message, code) = match err {
                CliError::Validation(m) => ("validation", m, 1),
                CliError::Internal(m) => ("internal", m, 2),
            };
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(code)
        }
    }
}
