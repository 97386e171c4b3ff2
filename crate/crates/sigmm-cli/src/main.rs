//! Command-line interface for the signomial programming solvers.
//!
//! Three subcommands: `solve` runs the appropriate solver on a problem file
//! and prints a summary (optionally writing a per-iteration trace), `diagnose`
//! prints the structural verdicts for a posynomial objective, and `verify`
//! replays a named regression suite against the published results.
//!
//! Exit codes: 0 on success (a reported divergence is a valid outcome),
//! 1 for usage or parse errors, 2 for internal numeric failures.

use sigmm_cli::{problem_file, runner};

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sigmm",
    version,
    about = "MM algorithms for geometric and signomial programming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SolveFlags {
    /// Relative-change convergence threshold.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration budget (per stage for penalized runs).
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Number of secant conditions for quasi-Newton acceleration (0-3).
    #[arg(long = "accel")]
    accel: Option<usize>,
    /// Penalty schedule exponents k0:k1 for lambda = 2^k.
    #[arg(long, value_parser = parse_schedule)]
    schedule: Option<(i32, i32)>,
    /// Per-stage convergence threshold for penalized runs.
    #[arg(long = "inner-eps")]
    inner_eps: Option<f64>,
    /// Boundary floor for the multiplicative quadratic-program updates.
    #[arg(long = "eps-floor")]
    eps_floor: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Write a per-iteration trace to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Accepted for interface stability; solves are deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report coercivity, strict convexity, and attainment for a posynomial.
    Diagnose {
        file: PathBuf,
        /// Accepted for interface stability; the certificate search uses a
        /// fixed internal seed so reports are reproducible.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a regression suite: table1, table2, table3, majorization, oracles.
    Verify { suite: String },
}

fn parse_schedule(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("schedule must be k0:k1")?;
    let k0 = a.parse().map_err(|_| "k0 must be an integer")?;
    let k1 = b.parse().map_err(|_| "k1 must be an integer")?;
    if k1 < k0 {
        return Err("k1 must be at least k0".to_string());
    }
    Ok((k0, k1))
}

/// Usage and parse problems exit 1; numeric failures inside a solver exit 2.
enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(file: &std::path::Path) -> Result<problem_file::ProblemFile, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        Failure::Usage(anyhow::anyhow!(
            "missing problem file {}: {e}",
            file.display()
        ))
    })?;
    problem_file::parse(&text).map_err(Failure::Usage)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Solve {
            file,
            flags,
            trace,
            seed: _,
        } => {
            let problem = load(&file)?;
            let overrides = runner::Overrides {
                epsilon: flags.epsilon,
                max_iters: flags.max_iters,
                accel: flags.accel,
                schedule: flags.schedule,
                inner_eps: flags.inner_eps,
                eps_floor: flags.eps_floor,
            };
            let out = runner::run_solve(&problem, &overrides, trace.is_some())
                .map_err(Failure::Numeric)?;
            print!("{}", out.summary);
            if let (Some(path), Some(body)) = (trace, out.trace) {
                std::fs::write(&path, body).map_err(|e| {
                    Failure::Usage(anyhow::anyhow!(
                        "cannot write trace {}: {e}",
                        path.display()
                    ))
                })?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Diagnose { file, seed: _ } => {
            let problem = load(&file)?;
            print!(
                "{}",
                runner::run_diagnose(&problem).map_err(Failure::Numeric)?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let (report, _ok) = runner::run_verify(&suite).map_err(Failure::Usage)?;
            print!("{report}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
