use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padic_polylog::describe::{grid_table, header, moments_table, series_table};
use padic_polylog::{moment_grid_closed, selftest, verify_polylog, Error};

mod config;

use config::{Command, JobConfig};

/// Fixed-precision p-adic measures and elliptic polylogarithm moment functions.
#[derive(Parser)]
#[command(name = "padic-polylog", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Amice transform of the input measure.
    Amice(Common),
    /// Moments ∫ x^k y^l for k, l <= level.
    Moments(Common),
    /// Restriction to the units, f - φψ(f).
    Restrict(Common),
    /// Frobenius-twisted restriction θ - σ(θ)([p](S), T).
    Stabilize(Common),
    /// Closed-form moment functions ê_(k,l), k + l <= level.
    Polylog(Common),
    /// Checks ∇ρ_n = (1 - Φ)(l_n) coefficient by coefficient.
    Verify(Common),
    /// Runs the invariant suites at small parameters.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    /// N_S or N_S,N_T
    #[arg(long)]
    orders: Option<String>,
    #[arg(long)]
    level: Option<usize>,
    /// restrict or stabilize
    #[arg(long)]
    mode: Option<String>,
    /// plain or poly-q:B
    #[arg(long)]
    ring: Option<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

const VERIFY_FAILED: u8 = 1;
const USAGE: u8 = 2;
const MALFORMED: u8 = 3;
const GUARD: u8 = 4;
const CLIPPED: u8 = 5;
const ARITHMETIC: u8 = 6;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => USAGE,
        Error::Parse { .. } | Error::Arity { .. } | Error::RingMismatch => MALFORMED,
        Error::GuardDigits { .. } | Error::PrecisionExhausted => GUARD,
        Error::Clipped { .. } => CLIPPED,
        _ => ARITHMETIC,
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config { field: "output", msg: format!("{}: {e}", p.display()) }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Config { field: "output", msg: e.to_string() })
        }
    }
}

/// Runs one job; `Ok(false)` means a verification ran and failed.
fn run(cfg: &JobConfig) -> Result<bool, Error> {
    let ring = cfg.ring_at(cfg.precision)?;
    let theta = cfg.description.measure(ring, &cfg.orders)?;
    let text = match cfg.command {
        Command::Amice => series_table(&theta.series),
        Command::Moments => moments_table(&theta, cfg.level)?,
        Command::Restrict => series_table(&theta.restrict_units().series),
        Command::Stabilize => series_table(&theta.stabilize().series),
        Command::Polylog => grid_table(&moment_grid_closed(&theta, cfg.level, cfg.mode, cfg.workers)?),
        Command::Verify => {
            let report = verify_polylog(&theta, cfg.level, cfg.mode, cfg.workers)?;
            let text = header(ring, theta.series.effective_precision(), &cfg.orders) + &report.to_string();
            emit(&cfg.output, &text)?;
            return Ok(report.pass());
        }
    };
    emit(&cfg.output, &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Amice(c) => (Command::Amice, c),
        Cmd::Moments(c) => (Command::Moments, c),
        Cmd::Restrict(c) => (Command::Restrict, c),
        Cmd::Stabilize(c) => (Command::Stabilize, c),
        Cmd::Polylog(c) => (Command::Polylog, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Selftest(a) => {
            let checks = selftest::run(a.seed, a.trials);
            let mut text = String::new();
            for c in &checks {
                if c.passed {
                    text.push_str(&format!("ok\t{}\n", c.name));
                } else {
                    text.push_str(&format!("FAIL\t{}\t{}\n", c.name, c.detail));
                }
            }
            let pass = checks.iter().all(|c| c.passed);
            text.push_str(if pass { "PASS\n" } else { "FAIL\n" });
            if let Err(e) = emit(&a.output, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
            return if pass { ExitCode::SUCCESS } else { ExitCode::from(VERIFY_FAILED) };
        }
    };
    let result = JobConfig::resolve(command, &flags).and_then(|cfg| run(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
