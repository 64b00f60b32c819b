//! score-ppl: fetch token log-probabilities from a scorer endpoint, compute
//! clipped sliding-window perplexity, normalize (inverted by default), and
//! write a score file.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::corpus::read_samples;
use deteval_core::scorer::client::run_batch;
use deteval_core::scorer::{
    normalize_scores, perplexity, write_score_file, NormMethod, ScoreRecord, ScorerClient,
    DEFAULT_CLIP, DEFAULT_STRIDE, DEFAULT_WINDOW,
};

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct ScorePplArgs {
    /// Labeled samples, one JSON object per line.
    #[arg(long)]
    pub samples: PathBuf,
    /// Endpoint name: resolved from the config's [endpoint.<name>] section.
    #[arg(long)]
    pub endpoint: String,
    /// Normalization converting raw perplexity to a [0,1] score.
    #[arg(long, default_value = "rank")]
    pub method: String,
    /// Keep the raw direction (by default lower perplexity scores higher).
    #[arg(long)]
    pub no_invert: bool,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    pub stride: usize,
    #[arg(long, default_value_t = DEFAULT_CLIP)]
    pub clip: f64,
    #[arg(long, default_value = "scores_ppl.jsonl")]
    pub output: String,
}

pub fn run(settings: &Settings, args: &ScorePplArgs) -> Result<()> {
    let samples = read_samples(&args.samples)
        .with_context(|| format!("reading samples from {}", args.samples.display()))?;
    let method: NormMethod = args.method.parse::<NormMethod>()?;
    let client = crate::config_client(settings, &args.endpoint)?;
    let workers = settings.workers.min(client.max_in_flight());

    let results = run_batch(&samples, workers, |sample| {
        let lp = client.token_logprobs(&sample.id, &sample.text)?;
        perplexity(&lp, args.window, args.stride, args.clip)
    });

    let mut raw = Vec::new();
    let mut failed = 0usize;
    let mut first_error = None;
    for (sample, result) in samples.iter().zip(results) {
        match result {
            Ok(ppl) => raw.push((sample.id.clone(), ppl.ppl)),
            Err(e) => {
                failed += 1;
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if raw.is_empty() {
        match first_error {
            Some(e) => return Err(e.into()),
            None => bail!("no samples to score"),
        }
    }

    let invert = !args.no_invert;
    let normalized = normalize_scores(&raw, method, invert)?;
    let records: Vec<ScoreRecord> = raw
        .iter()
        .zip(&normalized)
        .map(|((id, ppl), (_, score))| ScoreRecord {
            id: id.clone(),
            raw: *ppl,
            score: *score,
            method: format!("ppl_{}", method.as_str()),
        })
        .collect();
    let out = settings.out_path(&args.output);
    write_score_file(&out, &records)?;
    println!(
        "scored={} failed={failed} method={} invert={invert} output={}",
        records.len(),
        method.as_str(),
        out.display()
    );
    log_run(
        &settings.out_dir,
        &format!("score-ppl endpoint={} n={}", args.endpoint, records.len()),
    );
    Ok(())
}
