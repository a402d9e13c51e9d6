//! `aprime` - searches and diagnostics for almost-prime and Carmichael
//! numbers.
//!
//! Exit codes: 0 completed, 1 usage or configuration error, 2 verification
//! failure, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod diagnose;
mod search;
mod statscmd;
mod util;
mod verifycmd;

use aprime_core::filters::FilterKind;

#[derive(Debug, Parser)]
#[command(name = "aprime", version, about = "Almost-prime and Carmichael number toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Scan every integer for weak almost-primality.
    Weak,
    /// Scan every integer for almost-primality (square-free + criterion).
    Almost,
    /// Enumerate Carmichael numbers, then test each candidate.
    #[value(name = "carmichael-first")]
    CarmichaelFirst,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Diagnose a single number: predicates, Carmichael status, filters.
    Test {
        n: u64,
        /// Run the exhaustive oracles only up to this bound.
        #[arg(long, default_value_t = 100_000)]
        oracle_cutoff: u64,
        /// Cap on the odd prime powers examined per prime divisor.
        #[arg(long, default_value_t = 512)]
        s_cap: u64,
    },
    /// Range search emitting one JSON record per line plus a CSV summary.
    Search {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value = "weak")]
        mode: Mode,
        /// Comma-separated filter names, in execution order.
        #[arg(long, value_delimiter = ',')]
        filters: Option<Vec<String>>,
        #[arg(long, default_value_t = 512)]
        s_cap: u64,
        /// Worker threads (default: APRIME_JOBS or all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Numbers per work block.
        #[arg(long, default_value_t = 4096)]
        block: u64,
        /// Checkpoint file; requires --out. Resuming refuses a mismatched
        /// configuration.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Record output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run every filter per candidate instead of stopping at the first
        /// failure, and include the full verdict list in each record.
        #[arg(long)]
        exhaustive: bool,
    },
    /// List Carmichael numbers up to a bound as JSON lines.
    Carmichael {
        #[arg(long)]
        max: u64,
    },
    /// Per-Carmichael prime-divisor statistics as CSV.
    Stats {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
        /// CSV output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-verification suites.
    Verify {
        /// Reduced bounds, same suites.
        #[arg(long)]
        quick: bool,
    },
}

/// Failure carrying the process exit code.
pub enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn io(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }
}

fn parse_filters(names: Option<Vec<String>>) -> Result<Vec<FilterKind>, CliError> {
    match names {
        None => Ok(FilterKind::ALL.to_vec()),
        Some(names) => names
            .iter()
            .map(|name| {
                name.trim()
                    .parse::<FilterKind>()
                    .map_err(|_| CliError::Usage(format!("unknown filter name: {name}")))
            })
            .collect(),
    }
}

fn default_jobs(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("APRIME_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Test { n, oracle_cutoff, s_cap } => diagnose::run(n, oracle_cutoff, s_cap),
        Command::Search {
            min,
            max,
            mode,
            filters,
            s_cap,
            jobs,
            block,
            checkpoint,
            out,
            exhaustive,
        } => {
            if block < 1 {
                return Err(CliError::Usage("--block must be at least 1".into()));
            }
            if checkpoint.is_some() && out.is_none() {
                return Err(CliError::Usage("--checkpoint requires --out".into()));
            }
            let opts = search::SearchOptions {
                min,
                max,
                mode,
                filters: parse_filters(filters)?,
                s_cap,
                jobs: default_jobs(jobs),
                block,
                checkpoint,
                out,
                exhaustive,
            };
            search::run(&opts)
        }
        Command::Carmichael { max } => {
            let mut stdout = std::io::BufWriter::new(std::io::stdout().lock());
            search::list_carmichael(max, &mut stdout).map_err(CliError::io)
        }
        Command::Stats { min, max, out } => statscmd::run(min, max, out),
        Command::Verify { quick } => verifycmd::run(quick),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
