//! judge: LLM-as-detector scoring through a judge endpoint under the
//! zero-shot, few-shot, CoT, or rubric regime.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::corpus::{read_samples, TextSample};
use deteval_core::judge::{
    apply_verdict_override, builtin_template, compute_task_prior, constrained_score,
    hybrid_ensemble, model_defaults, parse_cot, parse_rubric, render_prompt, retrieve_fewshot,
    JudgeConfig, PromptRegime, PromptTemplate, TaskPrior,
};
use deteval_core::scorer::client::{run_batch, GenerationParams};
use deteval_core::scorer::{write_score_file, ScoreRecord, ScorerClient};

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct JudgeArgs {
    #[arg(long)]
    pub samples: PathBuf,
    /// Endpoint name of the judge model.
    #[arg(long)]
    pub endpoint: String,
    #[arg(long, default_value = "zero_shot")]
    pub regime: String,
    /// Pull polarity/dead-zone/shots defaults from the shipped table for
    /// this model id (falls back to standard polarity defaults).
    #[arg(long)]
    pub model: Option<String>,
    /// Override the polarity from the model defaults.
    #[arg(long)]
    pub polarity: Option<String>,
    /// Few-shot example pool (labeled samples JSONL). Required for few_shot.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    /// Override the number of few-shot examples.
    #[arg(long)]
    pub k: Option<usize>,
    /// Prompt texts (samples JSONL) used to compute the task prior.
    #[arg(long)]
    pub prior_prompts: Option<PathBuf>,
    /// Custom template file replacing the built-in one for the regime.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Enable the verdict-override interval, e.g. "0.35,0.65".
    #[arg(long)]
    pub verdict_override: Option<String>,
    #[arg(long, default_value = "scores_judge.jsonl")]
    pub output: String,
}

fn resolve_config(args: &JudgeArgs) -> Result<JudgeConfig> {
    let mut config = args
        .model
        .as_deref()
        .and_then(model_defaults)
        .unwrap_or_default();
    if let Some(polarity) = &args.polarity {
        config.polarity = polarity.parse()?;
    }
    if let Some(k) = args.k {
        config.k_shots = k;
    }
    if let Some(interval) = &args.verdict_override {
        let Some((lo, hi)) = interval.split_once(',') else {
            bail!("--verdict-override expects lo,hi");
        };
        config.verdict_override = Some((lo.trim().parse()?, hi.trim().parse()?));
    }
    config.validate()?;
    Ok(config)
}

fn compute_prior(
    client: &dyn ScorerClient,
    template: &PromptTemplate,
    config: &JudgeConfig,
    prompts: &[TextSample],
    workers: usize,
) -> Result<TaskPrior> {
    let results = run_batch(prompts, workers, |sample| {
        let prompt = render_prompt(template, &sample.text, None, config.polarity)?;
        client.yes_no_logits(&prompt)
    });
    let pairs: Vec<(f64, f64)> = results.into_iter().collect::<deteval_core::Result<_>>()?;
    Ok(compute_task_prior(&pairs)?)
}

pub fn run(settings: &Settings, args: &JudgeArgs) -> Result<()> {
    let samples = read_samples(&args.samples)
        .with_context(|| format!("reading samples from {}", args.samples.display()))?;
    let regime: PromptRegime = args.regime.parse()?;
    let config = resolve_config(args)?;
    let client = crate::config_client(settings, &args.endpoint)?;
    let workers = settings.workers.min(client.max_in_flight());

    let template = match &args.template {
        Some(path) => PromptTemplate::load(path, regime)?,
        None => builtin_template(regime, config.polarity),
    };
    // zero-shot template drives both the prior and the CoT logit side
    let zero_shot_template = builtin_template(PromptRegime::ZeroShot, config.polarity);

    let prior: Option<TaskPrior> = match &args.prior_prompts {
        Some(path) => {
            let prompts = read_samples(path)?;
            Some(compute_prior(
                &client,
                &zero_shot_template,
                &config,
                &prompts,
                workers,
            )?)
        }
        None => None,
    };

    let pool: Vec<TextSample> = match &args.pool {
        Some(path) => read_samples(path)?,
        None => Vec::new(),
    };
    if regime == PromptRegime::FewShot && pool.is_empty() {
        bail!("few_shot regime needs --pool");
    }

    let params = GenerationParams {
        max_new_tokens: config.max_new_tokens,
        temperature: 0.0,
        seed: settings.seed,
    };

    let results = run_batch(&samples, workers, |sample| {
        let score = match regime {
            PromptRegime::ZeroShot => {
                let prompt = render_prompt(&template, &sample.text, None, config.polarity)?;
                let (yes, no) = client.yes_no_logits(&prompt)?;
                constrained_score(yes, no, config.polarity, prior.as_ref())?
            }
            PromptRegime::FewShot => {
                let shots = retrieve_fewshot(&sample.text, &pool, config.k_shots)?;
                let prompt = render_prompt(&template, &sample.text, Some(&shots), config.polarity)?;
                let (yes, no) = client.yes_no_logits(&prompt)?;
                constrained_score(yes, no, config.polarity, prior.as_ref())?
            }
            PromptRegime::Cot => {
                let prompt = render_prompt(&template, &sample.text, None, config.polarity)?;
                let generated = client.generate(&prompt, &params)?;
                let parsed = parse_cot(&generated, config.polarity);
                let zs_prompt =
                    render_prompt(&zero_shot_template, &sample.text, None, config.polarity)?;
                let (yes, no) = client.yes_no_logits(&zs_prompt)?;
                let logit_score = constrained_score(yes, no, config.polarity, prior.as_ref())?;
                let blended = hybrid_ensemble(parsed.confidence, logit_score, &config)?;
                apply_verdict_override(blended, parsed.verdict, &config)
            }
            PromptRegime::Rubric => {
                let prompt = render_prompt(&template, &sample.text, None, config.polarity)?;
                let generated = client.generate(&prompt, &params)?;
                parse_rubric(&generated).ok_or_else(|| {
                    deteval_core::Error::InvalidInput(format!(
                        "sample {}: rubric output unparseable",
                        sample.id
                    ))
                })?
            }
        };
        Ok(score)
    });

    let mut records = Vec::new();
    let mut failed = 0usize;
    let mut first_error = None;
    for (sample, result) in samples.iter().zip(results) {
        match result {
            Ok(score) => records.push(ScoreRecord {
                id: sample.id.clone(),
                raw: score,
                score,
                method: format!("judge_{}", args.regime),
            }),
            Err(e) => {
                failed += 1;
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if records.is_empty() {
        match first_error {
            Some(e) => return Err(e.into()),
            None => bail!("no samples to judge"),
        }
    }

    let out = settings.out_path(&args.output);
    write_score_file(&out, &records)?;
    println!(
        "scored={} failed={failed} regime={} polarity={:?} prior={} output={}",
        records.len(),
        args.regime,
        config.polarity,
        prior.is_some(),
        out.display()
    );
    log_run(
        &settings.out_dir,
        &format!("judge endpoint={} regime={}", args.endpoint, args.regime),
    );
    Ok(())
}
