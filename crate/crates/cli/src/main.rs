//! bandgate: supervised, embedded band selection from the command line.
//!
//! Subcommands: `gen` writes a synthetic planted-band dataset, `train`
//! runs one selector training run, `sweep` cross-validates methods over a
//! k grid, `report` turns a sweep CSV into an SVG chart plus an AUC table.
//! Every command honors --seed; identical invocations produce identical
//! output bytes. BANDGATE_THREADS caps the fold worker pool.

mod config_file;
mod report;
mod run;
mod svg;

use bandgate::data::{generate, save_csv, SyntheticSpec};
use bandgate::error::Error;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bandgate", version, about = "Embedded hyperspectral band selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted informative bands.
    Gen(GenArgs),
    /// Train a band selector jointly with the classifier.
    Train(run::TrainArgs),
    /// Cross-validate methods over a grid of band budgets.
    Sweep(run::SweepArgs),
    /// Render a sweep CSV as an SVG chart with per-method AUC.
    Report(report::ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of spectral bands.
    #[arg(long)]
    bands: usize,
    /// Number of classes.
    #[arg(long)]
    classes: usize,
    /// Number of samples.
    #[arg(long)]
    samples: usize,
    /// Comma-separated informative band indices (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    informative: Vec<usize>,
    /// Level separation between classes on informative bands.
    #[arg(long, default_value_t = 1.0)]
    gap: f64,
    /// Measurement noise standard deviation.
    #[arg(long, default_value_t = 0.25)]
    noise_std: f64,
    /// Half-width of the background smoothing window.
    #[arg(long, default_value_t = 0)]
    correlation_width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_gen(args: GenArgs) -> bandgate::Result<()> {
    let spec = SyntheticSpec {
        n_bands: args.bands,
        n_classes: args.classes,
        samples: args.samples,
        informative: args.informative,
        class_signature_gap: args.gap,
        noise_std: args.noise_std,
        correlation_width: args.correlation_width,
        seed: args.seed,
    };
    let data = generate(&spec)?;
    save_csv(&data, &args.out)?;
    let informative = spec
        .informative
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!(
        "dataset: {} samples, {} bands, {} classes, informative bands: {}",
        data.len(),
        data.n_bands(),
        data.n_classes(),
        if informative.is_empty() { "none" } else { &informative },
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Train(args) => run::cmd_train(args),
        Command::Sweep(args) => run::cmd_sweep(args),
        Command::Report(args) => report::cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidParameter(_) | Error::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
