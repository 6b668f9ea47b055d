//! `icsi`: command-line front end for rate regions, reliability checks,
//! scheme search and Monte Carlo simulation.
//!
//! Exit codes: 0 success or feasible, 1 checked and negative, 2 usage,
//! parse or runtime error.

mod commands;
mod doc;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use icsi::regions::DEFAULT_EPS;

use commands::{Outcome, RegionKind, SearchArgs, SimArgs, Target, Theorem};
use doc::SpecDocument;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Missing(String),
    Core(String, icsi::Error),
}

impl CliError {
    fn field(field: &str, e: icsi::Error) -> Self {
        CliError::Core(field.to_string(), e)
    }

    fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Parse(m) => CliError::Parse(format!("{ctx}: {m}")),
            CliError::Core(f, e) => CliError::Core(format!("{ctx}: {f}"), e),
            other => other,
        }
    }
}

impl From<icsi::Error> for CliError {
    fn from(e: icsi::Error) -> Self {
        CliError::Core(String::new(), e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "invalid spec: {m}"),
            CliError::Missing(m) => write!(f, "the input document lacks {m}"),
            CliError::Core(ctx, e) if ctx.is_empty() => write!(f, "{e}"),
            CliError::Core(ctx, e) => write!(f, "{ctx}: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "icsi", version, about = "Interference channels with receiver side information")]
struct Cli {
    /// Worker threads for search and simulation; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alphabet sizes, source entropies and channel conditions.
    Info {
        spec: PathBuf,
        /// Seed for the random input laws of the Condition-1 check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Margins of one set of reliability conditions.
    Check {
        spec: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Vertices of a rate region.
    Region {
        spec: PathBuf,
        #[arg(long, value_enum)]
        region: RegionKind,
        #[arg(long)]
        gamma: Option<f64>,
        /// Vertex CSV destination.
        #[arg(long, visible_alias = "csv")]
        out: Option<PathBuf>,
    },
    /// Searches auxiliary schemes for the largest minimum margin.
    Search {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "t2")]
        target: Target,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Writes the input document with the winning scheme in place.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Margin CSV destination.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo error estimates, one row per blocklength.
    Simulate {
        spec: PathBuf,
        /// Blocklengths, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Estimate CSV destination.
        #[arg(long, visible_alias = "csv")]
        out: Option<PathBuf>,
    },
    /// Compares the eliminated pre-elimination system with the direct one.
    FmVerify {
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        instantiations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shifts every direct bound to exercise the mismatch path.
        #[arg(long, hide = true)]
        corrupt: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn write_csv(outcome: &Outcome, path: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, outcome.table.to_csv()?).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    let (outcome, csv) = match cli.command {
        Command::Info { spec, seed, csv } => (commands::info(&SpecDocument::load(&spec)?, seed)?, csv),
        Command::Check { spec, theorem, eps, csv } => (commands::check(&SpecDocument::load(&spec)?, theorem, eps)?, csv),
        Command::Region { spec, region, gamma, out } => (commands::region(&SpecDocument::load(&spec)?, region, gamma)?, out),
        Command::Search { spec, target, seed, restarts, iterations, eps, out, csv } => {
            let args = SearchArgs { target, seed, restarts, iterations, eps };
            let (outcome, best) = commands::search(&SpecDocument::load(&spec)?, &args)?;
            if let Some(p) = out {
                std::fs::write(&p, best.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            }
            (outcome, csv)
        }
        Command::Simulate { spec, n, trials, seed, delta, out } => {
            (commands::simulate(&SpecDocument::load(&spec)?, &SimArgs { n, trials, seed, delta })?, out)
        }
        Command::FmVerify { spec, instantiations, seed, corrupt, csv } => {
            (commands::fm_verify(&SpecDocument::load(&spec)?, instantiations, seed, corrupt)?, csv)
        }
    };
    write_csv(&outcome, csv.as_deref())?;
    print!("{}", outcome.report);
    Ok(outcome.status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
