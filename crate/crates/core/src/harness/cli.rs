//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration and I/O problems, 2 when a
//! numerical routine fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

use super::config::{Algorithm, ConfigFile, ExperimentKind, ExperimentSpec};
use super::experiments;
use super::output::write_rows;

/// Environment variable capping worker threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "MA_OPT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ma-array-opt",
    version,
    about = "Movable-antenna position and beamforming optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize one scenario and print the result.
    Solve(CommonArgs),
    /// Per-iteration objective traces for MM and AO over segment lengths.
    Convergence(CommonArgs),
    /// Beam gain over an angle grid for each scheme's solution.
    Beampattern(CommonArgs),
    /// Achievable rate versus the number of antennas.
    SweepN(CommonArgs),
    /// Compare all schemes on one scenario.
    Baselines(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON scenario/experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file: CSV, or JSON if it ends in `.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated schemes: MM, AO, FPA, APS, ORACLE, BOUND.
    #[arg(long, value_delimiter = ',')]
    algo: Option<Vec<String>>,
    /// Starting layouts per solve (uniform layout plus seeded random ones).
    #[arg(long)]
    multi_start: Option<usize>,
    /// Seed for the random starting layouts.
    #[arg(long)]
    seed: Option<u64>,
    /// Relative change in lambda_max that ends the iteration.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap for MM and AO.
    #[arg(long)]
    max_iters: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentKind, CommonArgs) {
        match self {
            Command::Solve(a) => (ExperimentKind::Solve, a),
            Command::Convergence(a) => (ExperimentKind::Convergence, a),
            Command::Beampattern(a) => (ExperimentKind::Beampattern, a),
            Command::SweepN(a) => (ExperimentKind::SweepN, a),
            Command::Baselines(a) => (ExperimentKind::Baselines, a),
        }
    }
}

fn build_spec(kind: ExperimentKind, args: CommonArgs) -> Result<ExperimentSpec> {
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(list) = args.algo {
        file.algorithms = Some(
            list.iter()
                .map(|s| s.parse::<Algorithm>())
                .collect::<Result<_>>()?,
        );
    }
    file.multi_start = args.multi_start.or(file.multi_start);
    file.seed = args.seed.or(file.seed);
    file.tol = args.tol.or(file.tol);
    file.max_iters = args.max_iters.or(file.max_iters);
    if args.out.is_some() {
        file.output = args.out;
    }
    ExperimentSpec::resolve(kind, file)
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))
        }),
    }
}

fn execute<O: Write>(kind: ExperimentKind, args: CommonArgs, out: &mut O) -> Result<()> {
    let spec = build_spec(kind, args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let report = pool.install(|| experiments::run(&spec))?;

    let io = |source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    for line in &report.summary {
        writeln!(out, "{line}").map_err(io)?;
    }
    if let Some(path) = &spec.output {
        write_rows(path, &report.rows)?;
        writeln!(out, "wrote {} rows to {}", report.rows.len(), path.display()).map_err(io)?;
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Output goes to `out`, diagnostics to `err`.
pub fn run_cli<I, T, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_CONFIG
                }
            };
        }
    };
    let (kind, args) = cli.command.split();
    match execute(kind, args, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numeric() {
                EXIT_NUMERIC
            } else {
                EXIT_CONFIG
            }
        }
    }
}

/// [`run_cli`] against the real process streams.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
