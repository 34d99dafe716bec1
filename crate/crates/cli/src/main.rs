//! `fae`: train, search, score and inspect dilated-convolution VAE models.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "fae", version, about = "Time-series anomaly detection with a dilated-convolution VAE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct RunArgs {
    /// Config file of `key=value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// `key=value` overrides, applied after the config file.
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic series into `series.csv`.
    Synth(RunArgs),
    /// Train a model; writes `model.fae` and `history.csv`.
    Train(RunArgs),
    /// Random hyperparameter search; writes `leaderboard.csv`.
    Search(RunArgs),
    /// Score every series; writes `scores_<id>.csv`.
    Detect(RunArgs),
    /// Point-wise metrics on the test partitions; writes `metrics.csv`.
    Eval(RunArgs),
    /// Encode windows and project on principal axes; writes `projections.csv`.
    Latent(RunArgs),
    /// Hold-out experiment; writes `zeroshot.csv`.
    Zeroshot(RunArgs),
    /// Print depth and parameter count of a model file or hyperparameter set.
    Info(RunArgs),
    /// Print the config key reference.
    Keys,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (args, run): (RunArgs, fn(&RunConfig) -> fae_core::Result<()>) = match cli.command {
        Command::Synth(a) => (a, commands::synth),
        Command::Train(a) => (a, commands::train),
        Command::Search(a) => (a, commands::search),
        Command::Detect(a) => (a, commands::detect),
        Command::Eval(a) => (a, commands::eval),
        Command::Latent(a) => (a, commands::latent),
        Command::Zeroshot(a) => (a, commands::zeroshot),
        Command::Info(a) => (a, commands::info),
        Command::Keys => {
            print!("{}", config::schema_reference());
            return ExitCode::SUCCESS;
        }
    };
    let result = RunConfig::load(args.config.as_deref(), &args.overrides).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error kind={} code={} message={message}", e.kind(), e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
