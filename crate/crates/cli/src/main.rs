//! `wtd`: decompositions, secrecy capacities and layered-scheme simulations
//! from JSON problem files.

mod commands;
mod error;
mod problem;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Kind, Output, Overrides, Scheme};
use error::CliError;
use problem::ProblemFile;
use report::ReportFile;

#[derive(Parser)]
#[command(name = "wtd", version, about = "Layered transceivers for MIMO wiretap and confidential broadcast channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Problem file (JSON).
    #[arg(long, short)]
    input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write the per-stream table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor `h_b` (or the pair `h_b`, `h_e`/`h_c` for gsvd).
    Decompose {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Secrecy capacity under the covariance constraint, optionally with a
    /// power-constrained search.
    Capacity {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        mode: Option<String>,
        /// Total transmit power; enables the power-constrained search.
        #[arg(long)]
        power: Option<f64>,
        /// Search restarts.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Corner points of the confidential broadcast region.
    Region {
        #[command(flatten)]
        io: Io,
    },
    /// Monte Carlo check of a layered scheme against its analytic SINRs.
    Simulate {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// SIC with estimated (not genie) interference cancellation.
        #[arg(long)]
        no_genie: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WTD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::input(format!("WTD_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("WTD_THREADS: {e}")))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let (io, name) = match &cli.command {
        Command::Decompose { io, .. } => (io, "decompose"),
        Command::Capacity { io, .. } => (io, "capacity"),
        Command::Region { io } => (io, "region"),
        Command::Simulate { io, .. } => (io, "simulate"),
    };
    let raw = fs::read(&io.input)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", io.input.display())))?;
    let text = std::str::from_utf8(&raw).map_err(|_| CliError::input("problem file: not valid UTF-8"))?;
    let problem = ProblemFile::parse(text)?;

    let out: Output = match &cli.command {
        Command::Decompose { kind, .. } => commands::decompose(&problem, *kind)?,
        Command::Capacity { mode, power, budget, seed, .. } => {
            let o = Overrides {
                mode: mode.clone(),
                power: *power,
                budget: *budget,
                seed: *seed,
                ..Overrides::default()
            };
            commands::capacity(&problem, &o)?
        }
        Command::Region { .. } => commands::region(&problem)?,
        Command::Simulate { scheme, mode, samples, seed, no_genie, .. } => {
            let o = Overrides {
                mode: mode.clone(),
                samples: *samples,
                seed: *seed,
                genie: !no_genie,
                ..Overrides::default()
            };
            commands::simulate(&problem, *scheme, &o)?
        }
    };

    let json = ReportFile::new(name, out.settings, &raw, out.results).to_json();
    match &io.out {
        Some(path) => write(path, &json)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.as_bytes())
                .map_err(|e| CliError::input(format!("cannot write stdout: {e}")))?;
        }
    }
    if let Some(path) = &io.csv {
        write(path, &out.table.to_csv())?;
    }
    if out.code != 0 {
        eprintln!("error: simulation outside its tolerance bands (see report)");
    }
    Ok(out.code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
