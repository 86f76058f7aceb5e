//! `tomostat`: simulate homodyne data and compare the statistical uncertainty
//! of balanced and unbalanced estimates of filtered quasiprobabilities.

mod commands;
mod config;
mod exit;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, CONFIG_HELP};
use exit::CliError;

#[derive(Parser)]
#[command(name = "tomostat", version, about, after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Draw N quadrature records and write them in the v1 sample format
    Simulate {
        #[arg(long, default_value = "samples.txt")]
        out: PathBuf,
    },
    /// Estimate the quasiprobability at alpha from a sample file
    Estimate {
        #[arg(long)]
        samples: PathBuf,
    },
    /// Theoretical P and standard errors of all schemes at alpha
    Theory,
    /// Scan the displacement grid and emit the comparison CSV (stdout unless --out)
    Compare {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the squeezed-state example: figure CSVs, gnuplot script and report.txt
    ReproduceExample {
        #[arg(long, default_value = "example-output")]
        out_dir: PathBuf,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TOMOSTAT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("TOMOSTAT_THREADS: expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("TOMOSTAT_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Simulate { out } => commands::simulate(&cfg, &out),
        Command::Estimate { samples } => commands::estimate(&cfg, &samples),
        Command::Theory => commands::theory(&cfg),
        Command::Compare { out } => commands::compare(&cfg, out.as_deref()),
        Command::ReproduceExample { out_dir } => {
            let report = reproduce::reproduce(&cfg, &out_dir)?;
            print!("{report}");
            println!("outputs in {}", out_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tomostat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
