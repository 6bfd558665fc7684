//! `tabgan` — synthesize and score tabular data from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tabgan::Error;

mod commands;
mod config;

#[derive(Parser)]
#[command(name = "tabgan", version, about = "Tabular GAN training, synthesis, and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Write a stand-in dataset as CSV
    Standin {
        /// Built-in spec name (icu_age, icu_age_by_ethnicity, icu_age_by_unit,
        /// icu_full) or path to a spec JSON file
        #[arg(long, default_value = "icu_age")]
        spec: String,
        /// Number of rows to draw
        #[arg(long)]
        n: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the dataset's schema JSON here
        #[arg(long)]
        schema_out: Option<PathBuf>,
    },
    /// Train a model as described by a run-config JSON file
    Train {
        /// Run-config JSON path
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample synthetic rows from a trained checkpoint
    Generate {
        /// Checkpoint JSON written by `train`
        #[arg(long)]
        checkpoint: PathBuf,
        /// Number of rows to synthesize
        #[arg(long)]
        n: usize,
        /// Pin every generated row to this condition category
        #[arg(long)]
        condition: Option<String>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score a generated table against the real one
    Evaluate {
        /// Real table CSV
        #[arg(long)]
        real: PathBuf,
        /// Generated table CSV
        #[arg(long)]
        generated: PathBuf,
        /// Schema JSON both tables must conform to
        #[arg(long)]
        schema: PathBuf,
        /// Comma-separated discrete target columns for the classifier battery
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// Output directory for the report and plots
        #[arg(long)]
        out: PathBuf,
        /// Train fraction for the baseline split
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
        /// Seed for the baseline split
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        /// Chi-squared comparison mode: `proportions` or `scaled-counts`
        #[arg(long, default_value = "proportions")]
        cs_mode: String,
    },
}

/// 2 for bad input (usage, config, schema, vocabulary), 1 for runtime
/// failures (I/O, numerics, worker faults), 0 for success.
fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Argument(_)
        | Error::Schema(_)
        | Error::Parse { .. }
        | Error::Vocabulary { .. }
        | Error::DegenerateColumn(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
