//! `thermofuse` command-line entry point.
//!
//! Exit codes: 0 success, 1 data or parameter error, 2 usage error.

mod classify;
mod diffuse;
mod features;
mod metrics;
mod output;
mod plot;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "thermofuse",
    version,
    about = "Thermogram lesion feature, diffusion and classification pipelines"
)]
struct Cli {
    /// Seed for every random draw; echoed in all reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonlinear boundary features (bcd, lle, le, apen) of lesion masks.
    Features(features::FeaturesArgs),
    /// Radial signal of a mask, with optional divergence curve and plots.
    Signal(features::SignalArgs),
    /// Sample images from the diffusion model with the Gaussian-optimal denoiser.
    Diffuse(diffuse::DiffuseArgs),
    /// Generative-model metrics.
    #[command(subcommand)]
    Metrics(metrics::MetricsCommand),
    /// Train a boosted-tree classifier.
    Train(classify::TrainArgs),
    /// Stratified k-fold cross-validation.
    Cv(classify::CvArgs),
    /// Apply a trained model.
    Predict(classify::PredictArgs),
    /// Synthetic contours, fractals, series and corpora.
    #[command(subcommand)]
    Synth(synth::SynthCommand),
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, 2) => log::LevelFilter::Debug,
        (false, _) => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Features(a) => features::run_features(&a, seed),
        Command::Signal(a) => features::run_signal(&a, seed),
        Command::Diffuse(a) => diffuse::run(&a, seed),
        Command::Metrics(m) => metrics::run(&m, seed),
        Command::Train(a) => classify::run_train(&a, seed),
        Command::Cv(a) => classify::run_cv(&a, seed),
        Command::Predict(a) => classify::run_predict(&a, seed),
        Command::Synth(s) => synth::run(&s, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
