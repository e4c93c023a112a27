//! `oritube` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime error, 2 negative domain verdict
//! (inadmissible section, unknown material), 64 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod design;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Toolkit for vacuum-driven origami-tube actuators.
#[derive(Debug, Parser)]
#[command(name = "oritube", version)]
struct Cli {
    /// `key = value` design and scenario file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for every file a command writes.
    #[arg(long, global = true, value_name = "DIR", default_value = "oritube-out")]
    out: PathBuf,
    /// Seed for randomized steps; overrides the `seed` config key.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a cross-section for admissibility.
    Check(CheckArgs),
    /// Write the tube (or assembly) STL, its crease pattern and a report.
    Generate,
    /// Sweep the rigid folding motion.
    Fold(FoldArgs),
    /// Displacement-controlled tensile simulation.
    Simulate(SimulateArgs),
    /// Fit the Ogden law to uniaxial tensile data.
    Fit(FitArgs),
    /// Extract metrics and plots from experiment traces.
    Analyze(AnalyzeArgs),
    /// List the materials catalog or look up one entry.
    Materials(MaterialsArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Side length of the first edge pair, mm.
    #[arg(long)]
    a: Option<f64>,
    /// Side length of the second edge pair, mm.
    #[arg(long)]
    b: Option<f64>,
    /// Slope of the first pair, degrees.
    #[arg(long)]
    theta1: Option<f64>,
    /// Slope of the second pair, degrees.
    #[arg(long)]
    theta2: Option<f64>,
    /// Explicit polygon `x,y; x,y; ...` in mm.
    #[arg(long, conflicts_with_all = ["a", "b", "theta1", "theta2"])]
    points: Option<String>,
    /// Length tolerance, mm.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct FoldArgs {
    /// Number of fold states.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_stop: Option<f64>,
    /// Also write one STL per state that encloses volume.
    #[arg(long)]
    frames: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Also write the deformed shell of every step as STL.
    #[arg(long)]
    frames: bool,
    /// Solve the symmetry-reduced quarter of a refined mesh.
    #[arg(long)]
    quarter: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// UTM export (`strain,stress_pa`); the bundled synthetic curve if omitted.
    #[arg(long, value_name = "CSV")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Directory of experiment traces; the bundled traces if omitted.
    #[arg(long, value_name = "DIR")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MaterialsArgs {
    /// Material name, case-insensitive.
    name: Option<String>,
}

/// How a command failed, mapped to the exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Verdict(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(64)
        }
        Err(Failure::Verdict(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(path) => oritube::config::Config::load(path).map_err(|e| match e {
            oritube::config::ConfigError::Io(io) => Failure::Runtime(anyhow::anyhow!("{}: {io}", path.display())),
            other => Failure::Usage(other.to_string()),
        })?,
        None => Default::default(),
    };
    config.reject_unknown(&design::known_keys()).map_err(|e| Failure::Usage(e.to_string()))?;
    let seed = match cli.seed {
        Some(s) => s,
        None => config.get_or("seed", design::DEFAULT_SEED).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    let ctx = commands::Context { config, out: cli.out, seed };
    match cli.command {
        Command::Check(a) => commands::check(&ctx, &a),
        Command::Generate => commands::generate(&ctx),
        Command::Fold(a) => commands::fold(&ctx, &a),
        Command::Simulate(a) => commands::simulate(&ctx, &a),
        Command::Fit(a) => commands::fit(&ctx, &a),
        Command::Analyze(a) => commands::analyze(&ctx, &a),
        Command::Materials(a) => commands::materials(&a),
    }
}
