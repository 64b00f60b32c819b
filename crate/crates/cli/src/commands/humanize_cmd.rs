//! humanize: produce L0/L1/L2 rewrite variants through a rewriting
//! endpoint, or evaluate per-level score files against a fixed human pool.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::corpus::{read_samples, Label};
use deteval_core::humanize::{
    evaluate_levels, run_levels, write_variants, HumanizationTemplates, Level,
};
use deteval_core::io::write_atomic;
use deteval_core::judge::{PromptRegime, PromptTemplate};
use deteval_core::metrics::ScoredSample;
use deteval_core::scorer::client::GenerationParams;
use deteval_core::scorer::read_score_file;

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct HumanizeArgs {
    /// AI samples to humanize (rewrite mode).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Rewriting endpoint name (rewrite mode).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Custom light/heavy rewrite templates ([TEXT] placeholder).
    #[arg(long)]
    pub light_template: Option<PathBuf>,
    #[arg(long)]
    pub heavy_template: Option<PathBuf>,
    #[arg(long, default_value_t = 400)]
    pub max_new_tokens: u32,
    #[arg(long, default_value = "variants.jsonl")]
    pub output: String,

    /// Evaluate mode: per-level AI score files plus the human pool scores.
    #[arg(long)]
    pub evaluate: bool,
    #[arg(long)]
    pub scores_l0: Option<PathBuf>,
    #[arg(long)]
    pub scores_l1: Option<PathBuf>,
    #[arg(long)]
    pub scores_l2: Option<PathBuf>,
    #[arg(long)]
    pub human_scores: Option<PathBuf>,
    #[arg(long, default_value = "levels.csv")]
    pub report_output: String,
}

fn rewrite_mode(settings: &Settings, args: &HumanizeArgs) -> Result<()> {
    let samples_path = args
        .samples
        .as_ref()
        .context("rewrite mode needs --samples")?;
    let endpoint = args
        .endpoint
        .as_ref()
        .context("rewrite mode needs --endpoint")?;
    let samples = read_samples(samples_path)?;
    let client = crate::config_client(settings, endpoint)?;

    let mut templates = HumanizationTemplates::default();
    if let Some(path) = &args.light_template {
        templates.light = PromptTemplate::load(path, PromptRegime::ZeroShot)?;
    }
    if let Some(path) = &args.heavy_template {
        templates.heavy = PromptTemplate::load(path, PromptRegime::ZeroShot)?;
    }
    let params = GenerationParams {
        max_new_tokens: args.max_new_tokens,
        temperature: 0.0,
        seed: settings.seed,
    };

    let run = run_levels(&client, &samples, &templates, &params);
    let out = settings.out_path(&args.output);
    write_variants(&out, &run.variants)?;
    if !run.failures.is_empty() {
        let failures = serde_json::to_vec_pretty(&run.failures)?;
        write_atomic(&settings.out_path("rewrite_failures.json"), &failures)?;
    }
    println!(
        "samples={} variants={} failures={} output={}",
        samples.len(),
        run.variants.len(),
        run.failures.len(),
        out.display()
    );
    Ok(())
}

fn load_level_scores(path: &Path, label: Label) -> Result<Vec<ScoredSample>> {
    let records = read_score_file(path)?;
    records
        .into_iter()
        .map(|r| Ok(ScoredSample::new(r.id, label, r.score)?))
        .collect()
}

fn evaluate_mode(settings: &Settings, args: &HumanizeArgs) -> Result<()> {
    let human_path = args
        .human_scores
        .as_ref()
        .context("evaluate mode needs --human-scores")?;
    let human = load_level_scores(human_path, Label::Human)?;

    let mut levels = Vec::new();
    for (level, path) in [
        (Level::L0, &args.scores_l0),
        (Level::L1, &args.scores_l1),
        (Level::L2, &args.scores_l2),
    ] {
        if let Some(path) = path {
            levels.push((level, load_level_scores(path, Label::Llm)?));
        }
    }
    if levels.is_empty() {
        bail!("evaluate mode needs at least one of --scores-l0/l1/l2");
    }

    let reports = evaluate_levels(&levels, &human)?;
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record([
        "level",
        "auroc",
        "detection_rate",
        "mean_ai_score",
        "mean_human_score",
        "brier",
        "n_ai",
        "n_human",
    ])?;
    for r in &reports {
        writer.write_record([
            r.level.to_string(),
            format!("{}", r.auroc),
            format!("{}", r.detection_rate),
            format!("{}", r.mean_ai_score),
            format!("{}", r.mean_human_score),
            format!("{}", r.brier),
            format!("{}", r.n_ai),
            format!("{}", r.n_human),
        ])?;
        println!(
            "level={} auroc={:.4} detection_rate={:.4} mean_ai={:.4} mean_human={:.4}",
            r.level, r.auroc, r.detection_rate, r.mean_ai_score, r.mean_human_score
        );
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let out = settings.out_path(&args.report_output);
    write_atomic(&out, &bytes)?;
    println!("levels={} output={}", reports.len(), out.display());
    Ok(())
}

pub fn run(settings: &Settings, args: &HumanizeArgs) -> Result<()> {
    if args.evaluate {
        evaluate_mode(settings, args)?;
    } else {
        rewrite_mode(settings, args)?;
    }
    log_run(&settings.out_dir, "humanize");
    Ok(())
}
