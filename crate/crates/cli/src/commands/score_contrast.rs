//! score-contrast: per-token log-likelihood gap between a large and a small
//! reference endpoint, in base, token-variance, or hybrid form.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::corpus::read_samples;
use deteval_core::scorer::client::run_batch;
use deteval_core::scorer::{
    contrastive_score, hybrid_contrastive, normalize_scores, write_score_file, ContrastVariant,
    NormMethod, ScoreRecord, ScorerClient, TokenLogProbs,
};

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct ScoreContrastArgs {
    #[arg(long)]
    pub samples: PathBuf,
    /// Endpoint name of the large reference model.
    #[arg(long)]
    pub large: String,
    /// Endpoint name of the small reference model.
    #[arg(long)]
    pub small: String,
    #[arg(long, default_value = "base")]
    pub variant: String,
    /// Normalization for base/token_variance raw values (hybrid is already
    /// a rank combination in [0,1]).
    #[arg(long, default_value = "rank")]
    pub method: String,
    /// Invert the normalized score (off by default: a larger gap reads as
    /// more model-like).
    #[arg(long)]
    pub invert: bool,
    #[arg(long, default_value = "scores_contrast.jsonl")]
    pub output: String,
}

pub fn run(settings: &Settings, args: &ScoreContrastArgs) -> Result<()> {
    let samples = read_samples(&args.samples)
        .with_context(|| format!("reading samples from {}", args.samples.display()))?;
    let variant: ContrastVariant = args.variant.parse()?;
    let method: NormMethod = args.method.parse()?;
    let large = crate::config_client(settings, &args.large)?;
    let small = crate::config_client(settings, &args.small)?;
    let workers = settings
        .workers
        .min(large.max_in_flight())
        .min(small.max_in_flight());

    let results = run_batch(&samples, workers, |sample| {
        let lp_large = large.token_logprobs(&sample.id, &sample.text)?;
        let lp_small = small.token_logprobs(&sample.id, &sample.text)?;
        Ok((lp_large, lp_small))
    });

    let mut pairs: Vec<(TokenLogProbs, TokenLogProbs)> = Vec::new();
    let mut failed = 0usize;
    let mut first_error = None;
    for result in results {
        match result {
            Ok(pair) => pairs.push(pair),
            Err(e) => {
                failed += 1;
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if pairs.is_empty() {
        match first_error {
            Some(e) => return Err(e.into()),
            None => bail!("no samples to score"),
        }
    }

    let records: Vec<ScoreRecord> = match variant {
        ContrastVariant::Hybrid => {
            let refs: Vec<(&TokenLogProbs, &TokenLogProbs)> =
                pairs.iter().map(|(l, s)| (l, s)).collect();
            hybrid_contrastive(&refs)?
                .into_iter()
                .map(|score| ScoreRecord {
                    id: score.sample_id,
                    raw: score.s,
                    score: score.s,
                    method: "contrast_hybrid".into(),
                })
                .collect()
        }
        _ => {
            let raw: Vec<(String, f64)> = pairs
                .iter()
                .map(|(l, s)| contrastive_score(l, s, variant).map(|c| (c.sample_id, c.s)))
                .collect::<deteval_core::Result<_>>()?;
            let normalized = normalize_scores(&raw, method, args.invert)?;
            raw.iter()
                .zip(&normalized)
                .map(|((id, s), (_, score))| ScoreRecord {
                    id: id.clone(),
                    raw: *s,
                    score: *score,
                    method: format!("contrast_{}_{}", args.variant, method.as_str()),
                })
                .collect()
        }
    };

    let out = settings.out_path(&args.output);
    write_score_file(&out, &records)?;
    println!(
        "scored={} failed={failed} variant={} output={}",
        records.len(),
        args.variant,
        out.display()
    );
    log_run(
        &settings.out_dir,
        &format!(
            "score-contrast large={} small={} variant={}",
            args.large, args.small, args.variant
        ),
    );
    Ok(())
}
