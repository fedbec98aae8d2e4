//! Command-line experiment runner for `nltrace`.

pub mod grid;
pub mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nltrace::lln::{envelope, moment_report, powers_report};
use nltrace::models::{fekete_sequence, CoinTossModel, PowersShiftModel, ShiftModel};
use nltrace::verify::{run_all, DEFAULT_TRIALS};
use nltrace::{parse_weight, ExperimentReport, ReportRow, WeightFunction};

use crate::report::{emit_report, emit_verify, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Default directory for relative `--output` paths.
pub const OUTPUT_DIR_ENV: &str = "NLTRACE_OUTPUT_DIR";

/// Slack for the subadditivity verdict of `fekete`.
const FEKETE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "nltrace",
    version,
    about = "Law-of-large-numbers experiments for Choquet-type non-linear traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Report file; relative paths resolve against $NLTRACE_OUTPUT_DIR when set.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments of s_n/n for coin-toss projections under an affine transform.
    Cointoss {
        #[arg(long, default_value = "sqrt")]
        weight: String,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value = "2^1..2^12")]
        n: String,
        /// `scale,offset`: each term is scale * p + offset * I.
        #[arg(long, allow_hyphen_values = true)]
        transform: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Uniform norms of s_n/n for Powers anticommuting families.
    Powers {
        /// Optional weight for moment rows next to the norm rows.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value = "1..10")]
        n: String,
        /// Anticommutation period.
        #[arg(long, default_value_t = 1)]
        period: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Limit envelopes and finite-n bounds for every n >= k.
    Bounds {
        #[arg(long, default_value = "sqrt")]
        weight: String,
        #[arg(long, default_value = "1..4")]
        k: String,
        #[arg(long, default_value = "1..64")]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        transform: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// The subadditive sequence x_n = phi(|s_n|^k)^(1/k) under the tensor shift.
    Fekete {
        #[arg(long, default_value = "sqrt")]
        weight: String,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Runs every named property suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[command(flatten)]
        output: Output,
    },
}

/// A diagnostic with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: e.to_string(),
    }
}

fn model(transform: Option<&str>) -> Result<CoinTossModel, Failure> {
    match transform {
        None => Ok(CoinTossModel::projections()),
        Some(t) => {
            let (scale, offset) = grid::parse_transform(t).map_err(config)?;
            CoinTossModel::new(scale, offset).map_err(config)
        }
    }
}

fn weight(input: &str) -> Result<WeightFunction, Failure> {
    parse_weight(input).map_err(config)
}

fn open_output(output: &Output) -> Result<Box<dyn Write>, Failure> {
    let Some(path) = &output.output else {
        return Ok(Box::new(io::stdout().lock()));
    };
    let path = match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.clone(),
    };
    let file = File::create(&path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn finish_report(report: &ExperimentReport, output: &Output) -> Result<u8, Failure> {
    let mut out = open_output(output)?;
    emit_report(report, output.format, &mut out).map_err(config)?;
    out.flush().map_err(config)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VIOLATION })
}

fn bounds_report(
    model: &CoinTossModel,
    w: &WeightFunction,
    ks: &[u32],
    ns: &[usize],
) -> Result<ExperimentReport, Failure> {
    let mut rows = Vec::new();
    for &k in ks {
        let env = envelope(model, w, k).map_err(config)?;
        rows.push(ReportRow {
            n: None,
            k,
            weight: w.name().to_string(),
            value: env.upper - env.lower,
            upper_bound: Some(env.upper),
            lower_bound: Some(env.lower),
            finite_n_bound: None,
            verdict: env.lower <= env.upper + nltrace::lln::VERDICT_TOL,
        });
        let eligible: Vec<usize> = ns.iter().copied().filter(|&n| n >= k as usize).collect();
        rows.extend(moment_report(model, w, &[k], &eligible).map_err(config)?.rows);
    }
    Ok(ExperimentReport { rows })
}

fn fekete_report(w: &WeightFunction, ks: &[u32], n_max: usize) -> Result<ExperimentReport, Failure> {
    let sm = ShiftModel {
        base: CoinTossModel::projections(),
    };
    let mut rows = Vec::new();
    for &k in ks {
        let x = fekete_sequence(&sm, w, k, n_max).map_err(config)?;
        for n in 1..=n_max {
            // tightest split x_a + x_b with a + b = n
            let split = (1..n)
                .map(|a| x[a - 1] + x[n - a - 1])
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
            rows.push(ReportRow {
                n: Some(n as u64),
                k,
                weight: w.name().to_string(),
                value: x[n - 1],
                upper_bound: split,
                lower_bound: None,
                finite_n_bound: None,
                verdict: split.is_none_or(|s| x[n - 1] <= s + FEKETE_TOL),
            });
        }
    }
    Ok(ExperimentReport { rows })
}

/// Runs one command and returns its exit code.
pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Cointoss {
            weight: w,
            k,
            n,
            transform,
            output,
        } => {
            let (w, ks, ns) = (
                weight(&w)?,
                grid::parse_k_list(&k).map_err(config)?,
                grid::parse_n_list(&n).map_err(config)?,
            );
            let report = moment_report(&model(transform.as_deref())?, &w, &ks, &ns).map_err(config)?;
            finish_report(&report, &output)
        }
        Command::Powers {
            weight: w,
            k,
            n,
            period,
            output,
        } => {
            let w = w.as_deref().map(weight).transpose()?;
            let (ks, ns) = (
                grid::parse_k_list(&k).map_err(config)?,
                grid::parse_n_list(&n).map_err(config)?,
            );
            let m = PowersShiftModel::new(period).map_err(config)?;
            let report = powers_report(&m, w.as_ref(), &ks, &ns).map_err(config)?;
            finish_report(&report, &output)
        }
        Command::Bounds {
            weight: w,
            k,
            n,
            transform,
            output,
        } => {
            let (w, ks, ns) = (
                weight(&w)?,
                grid::parse_k_list(&k).map_err(config)?,
                grid::parse_n_list(&n).map_err(config)?,
            );
            let report = bounds_report(&model(transform.as_deref())?, &w, &ks, &ns)?;
            finish_report(&report, &output)
        }
        Command::Fekete {
            weight: w,
            k,
            n_max,
            output,
        } => {
            if n_max == 0 {
                return Err(config("--n-max must be at least 1"));
            }
            let (w, ks) = (weight(&w)?, grid::parse_k_list(&k).map_err(config)?);
            let report = fekete_report(&w, &ks, n_max)?;
            finish_report(&report, &output)
        }
        Command::Verify { seed, trials, output } => {
            let outcomes = run_all(seed, trials);
            let mut out = open_output(&output)?;
            emit_verify(&outcomes, output.format, &mut out).map_err(config)?;
            out.flush().map_err(config)?;
            Ok(if outcomes.iter().all(|o| o.passed) {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
    }
}
