//! Command-line front end: `run` writes the artifacts of one cycle,
//! `convergence` tabulates distances between runs on refined grids.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 when the
//! simulation aborts. `RS_THREADS` caps the worker threads of `convergence`.

pub mod config;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::error::SimError;
use crate::scheme::Variant;
use crate::simulator::{relative_difference, run_with_snapshots, self_convergence, RunRecord, Scenario};
use config::{parse_config, ConfigError};
use output::{write_convergence, write_run, ConvergenceRow};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sbr", version, about = "Reactive settling in a sequencing batch reactor")]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one cycle and write profiles, outlet series and the audit.
    Run(RunArgs),
    /// Compare runs on several grids.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Split,
    Unsplit,
}

impl From<SchemeArg> for Variant {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Split => Variant::Split,
            SchemeArg::Unsplit => Variant::Unsplit,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file, or `bundled:<name>`.
    #[arg(long)]
    pub config: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of cells, overriding the config.
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Split)]
    pub scheme: SchemeArg,
    /// Snapshot cadence in seconds, overriding the config.
    #[arg(long)]
    pub snapshot_every: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Distance between the unsplit and the split run on each grid.
    SplitVsUnsplit,
    /// Distance between successive grids.
    #[value(name = "self")]
    SelfRefinement,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    /// Scenario file, or `bundled:<name>`.
    #[arg(long)]
    pub config: String,
    /// Grid sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub cells: Vec<usize>,
    /// Comparison time: seconds, or with an `s` or `h` suffix.
    #[arg(long, value_parser = parse_time)]
    pub at: f64,
    #[arg(long, value_enum, default_value_t = Mode::SplitVsUnsplit)]
    pub mode: Mode,
    /// Scheme used in self mode.
    #[arg(long, value_enum, default_value_t = SchemeArg::Split)]
    pub scheme: SchemeArg,
    /// Table destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `"360"`, `"360s"` and `"0.1h"` are all 360 seconds.
pub fn parse_time(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = if let Some(v) = s.strip_suffix('h') {
        (v, 3600.0)
    } else if let Some(v) = s.strip_suffix('s') {
        (v, 1.0)
    } else {
        (s, 1.0)
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("not a time: '{s}'"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("time must be non-negative: '{s}'"));
    }
    Ok(v * scale)
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Sim(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

fn load(spec: &str, cells: Option<usize>) -> Result<Scenario, CliError> {
    let mut sc = parse_config(spec)?;
    if let Some(n) = cells {
        sc = sc.with_cells(n);
        sc.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(sc)
}

pub fn cmd_run(args: &RunArgs) -> Result<RunRecord, CliError> {
    let mut sc = load(&args.config, args.cells)?;
    if let Some(every) = args.snapshot_every {
        sc.output.snapshot_every_s = every;
        sc.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let record = run_with_snapshots(&sc, args.scheme.into(), &[])?;
    write_run(&args.out, &record, &sc.settling)?;
    Ok(record)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RS_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("RS_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CliError::Usage("RS_THREADS must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Computes the convergence table. Runs for different grids execute in
/// parallel; the table is assembled once all have finished.
pub fn convergence_table(args: &ConvergenceArgs) -> Result<Vec<ConvergenceRow>, CliError> {
    let base = parse_config(&args.config)?;
    if args.mode == Mode::SelfRefinement && args.cells.len() < 2 {
        return Err(CliError::Usage("self mode needs at least two grid sizes".into()));
    }
    if args.at < base.start_s() || args.at > base.end_s() {
        return Err(CliError::Usage(format!(
            "comparison time {} s lies outside the schedule [{}, {}] s",
            args.at,
            base.start_s(),
            base.end_s()
        )));
    }
    let mut scenarios = Vec::with_capacity(args.cells.len());
    for &n in &args.cells {
        let mut sc = base.with_cells(n);
        // only the comparison instant is needed
        sc.output.snapshot_every_s = sc.end_s() - sc.start_s();
        sc.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        scenarios.push(sc);
    }
    let at = [args.at];
    let pool = thread_pool()?;
    let values: Vec<f64> = pool.install(|| -> Result<Vec<f64>, CliError> {
        match args.mode {
            Mode::SplitVsUnsplit => {
                let jobs: Vec<(usize, Variant)> =
                    (0..scenarios.len()).flat_map(|i| [(i, Variant::Split), (i, Variant::Unsplit)]).collect();
                let runs: Vec<RunRecord> = jobs
                    .par_iter()
                    .map(|&(i, v)| run_with_snapshots(&scenarios[i], v, &at))
                    .collect::<Result<_, _>>()?;
                runs.chunks(2).map(|p| Ok(relative_difference(&p[1], &p[0], args.at)?.value)).collect()
            }
            Mode::SelfRefinement => {
                let variant = args.scheme.into();
                let runs: Vec<RunRecord> =
                    scenarios.par_iter().map(|sc| run_with_snapshots(sc, variant, &at)).collect::<Result<_, _>>()?;
                runs.windows(2).map(|p| Ok(self_convergence(&p[0], &p[1], args.at)?.value)).collect()
            }
        }
    })?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let ratio = rows.last().map(|p: &ConvergenceRow| p.value / value);
        rows.push(ConvergenceRow { cells: args.cells[i], value, ratio });
    }
    Ok(rows)
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<Vec<ConvergenceRow>, CliError> {
    let rows = convergence_table(args)?;
    match &args.out {
        Some(p) => write_convergence(BufWriter::new(File::create(p)?), &rows)?,
        None => write_convergence(io::stdout().lock(), &rows)?,
    }
    Ok(rows)
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|r| {
            eprintln!(
                "{} cells, tau = {:e} s ({}), {} snapshots, {:.2} s wall clock",
                r.cells,
                r.tau,
                r.cfl.dominant,
                r.snapshots.len(),
                r.wall_clock_s
            );
        }),
        Command::Convergence(a) => cmd_convergence(a).map(|_| ()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_parsing() {
        assert_eq!(parse_time("360").unwrap(), 360.0);
        assert_eq!(parse_time("360s").unwrap(), 360.0);
        assert_eq!(parse_time("0.1h").unwrap(), 360.0);
        assert!(parse_time("-1").is_err());
        assert!(parse_time("soon").is_err());
    }

    #[test]
    fn command_line_shapes() {
        let cli = Cli::try_parse_from([
            "sbr", "convergence", "--config", "bundled:desk_settle", "--cells", "25,50,100", "--at", "180", "--mode", "self",
        ])
        .unwrap();
        match cli.command {
            Command::Convergence(a) => {
                assert_eq!(a.cells, vec![25, 50, 100]);
                assert_eq!(a.mode, Mode::SelfRefinement);
            }
            _ => panic!(),
        }
        let cli = Cli::try_parse_from(["sbr", "run", "--config", "x.json", "--out", "o", "--scheme", "unsplit"]).unwrap();
        assert!(matches!(cli.command, Command::Run(RunArgs { scheme: SchemeArg::Unsplit, .. })));
    }

    #[test]
    fn self_mode_needs_two_grids() {
        let args = ConvergenceArgs {
            config: "bundled:desk_settle".into(),
            cells: vec![25],
            at: 10.0,
            mode: Mode::SelfRefinement,
            scheme: SchemeArg::Split,
            out: None,
        };
        let e = convergence_table(&args).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }
}
