//! deteval: end-to-end pipeline driver for detector evaluation.
//!
//! Exit codes: 0 success, 2 invalid configuration or usage, 3 data errors,
//! 4 endpoint errors. Every error prints one machine-parseable line on
//! stderr. Re-running a subcommand with identical inputs and seed yields
//! byte-identical primary outputs; only the sidecar run.log carries
//! timestamps.

mod commands;
mod config;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::Settings;

/// Marker wrapping configuration-phase failures so they exit with 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(err: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(ConfigError(err))
}

/// Build an HTTP client for a named endpoint; a missing or malformed
/// endpoint section is a configuration error.
pub(crate) fn config_client(
    settings: &Settings,
    name: &str,
) -> Result<deteval_core::scorer::HttpScorerClient> {
    settings.config.client(name).map_err(config_err)
}

#[derive(Parser)]
#[command(
    name = "deteval",
    version,
    about = "Detector-evaluation pipeline: prepare, featurize, score, judge, train, evaluate, shift, humanize, report"
)]
struct Cli {
    /// Run configuration file (key = value with [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic stage (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for endpoint batches (capped by max_in_flight).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for all artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deduplicate, length-match, flatten, and split a paired corpus.
    Prepare(commands::prepare::PrepareArgs),
    /// Extract feature matrices from labeled samples.
    Featurize(commands::featurize::FeaturizeArgs),
    /// Perplexity-based detectability scores via a scorer endpoint.
    ScorePpl(commands::score_ppl::ScorePplArgs),
    /// Contrastive likelihood scores via two scorer endpoints.
    ScoreContrast(commands::score_contrast::ScoreContrastArgs),
    /// LLM-as-detector scores via a judge endpoint.
    Judge(commands::judge::JudgeArgs),
    /// Train the logistic-regression reference detector.
    TrainClf(commands::train_clf::TrainClfArgs),
    /// Compute the metric suite over a score file.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Distribution-shift distances between embedding populations.
    Shift(commands::shift_cmd::ShiftArgs),
    /// L0/L1/L2 adversarial humanization and per-level evaluation.
    Humanize(commands::humanize_cmd::HumanizeArgs),
    /// Merge metric CSVs into the condition grid, heatmap, and SVG plots.
    Report(commands::report::ReportArgs),
}

fn dispatch(cli: &Cli) -> Result<()> {
    let settings = Settings::resolve(
        cli.config.as_deref(),
        cli.seed,
        cli.workers,
        cli.out.as_deref(),
    )
    .map_err(config_err)?;
    match &cli.command {
        Command::Prepare(args) => commands::prepare::run(&settings, args),
        Command::Featurize(args) => commands::featurize::run(&settings, args),
        Command::ScorePpl(args) => commands::score_ppl::run(&settings, args),
        Command::ScoreContrast(args) => commands::score_contrast::run(&settings, args),
        Command::Judge(args) => commands::judge::run(&settings, args),
        Command::TrainClf(args) => commands::train_clf::run(&settings, args),
        Command::Evaluate(args) => commands::evaluate::run(&settings, args),
        Command::Shift(args) => commands::shift_cmd::run(&settings, args),
        Command::Humanize(args) => commands::humanize_cmd::run(&settings, args),
        Command::Report(args) => commands::report::run(&settings, args),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    let endpoint = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<deteval_core::Error>(),
            Some(e) if e.is_endpoint()
        ) || cause
            .downcast_ref::<deteval_core::EndpointError>()
            .is_some()
    });
    if endpoint {
        4
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
