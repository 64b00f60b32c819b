//! featurize: samples JSONL -> feature matrix CSV (classical or extended),
//! with optional external annotations and per-sentence perplexities.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use deteval_core::corpus::read_samples;
use deteval_core::features::{
    load_phrase_file, merge_annotations, merge_missing_annotations, write_feature_csv,
    AnnotationRecord, FeatureExtractor, Lexicons,
};
use deteval_core::io::read_jsonl;
use deteval_core::scorer::client::run_batch;
use deteval_core::scorer::{sentence_perplexities, ScorerClient};
use serde::Deserialize;

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Labeled samples, one JSON object per line.
    #[arg(long)]
    pub samples: PathBuf,
    /// Extract the extended stylometric set on top of the 22 classical
    /// features.
    #[arg(long)]
    pub extended: bool,
    /// JSON Lines of {"id", "ppl": [..]} per-sentence perplexities scored
    /// upstream (first 15 sentences). Missing ids stay missing-marked.
    #[arg(long)]
    pub sentence_ppl: Option<PathBuf>,
    /// Score per-sentence perplexities live through this endpoint instead
    /// of reading them from a file.
    #[arg(long)]
    pub ppl_endpoint: Option<String>,
    /// JSON Lines of POS/dependency annotation records; samples without a
    /// record get missing-marked annotation features.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Directory of lexicon overrides (hedging.txt, certainty.txt,
    /// connectors.txt, function_words.txt, top_function_words.txt,
    /// ai_phrases.txt); files that exist replace the built-in lists.
    #[arg(long)]
    pub lexicon_dir: Option<PathBuf>,
    /// Output file name within the out directory.
    #[arg(long, default_value = "features.csv")]
    pub output: String,
}

#[derive(Debug, Deserialize)]
struct SentencePplRecord {
    id: String,
    ppl: Vec<f64>,
}

fn load_lexicons(dir: &Path) -> Result<Lexicons> {
    let mut lexicons = Lexicons::default();
    let slot = |file: &str, target: &mut Vec<String>| -> Result<()> {
        let path = dir.join(file);
        if path.exists() {
            *target = load_phrase_file(&path)?;
        }
        Ok(())
    };
    slot("hedging.txt", &mut lexicons.hedging)?;
    slot("certainty.txt", &mut lexicons.certainty)?;
    slot("connectors.txt", &mut lexicons.connectors)?;
    slot("function_words.txt", &mut lexicons.function_words)?;
    slot("top_function_words.txt", &mut lexicons.top_function_words)?;
    slot("ai_phrases.txt", &mut lexicons.ai_phrases)?;
    Ok(lexicons)
}

pub fn run(settings: &Settings, args: &FeaturizeArgs) -> Result<()> {
    let samples = read_samples(&args.samples)
        .with_context(|| format!("reading samples from {}", args.samples.display()))?;

    let lexicons = match &args.lexicon_dir {
        Some(dir) => load_lexicons(dir)?,
        None => Lexicons::default(),
    };
    let extractor = FeatureExtractor::new(lexicons);

    let mut ppl_by_id: HashMap<String, Vec<f64>> = match &args.sentence_ppl {
        Some(path) => read_jsonl::<SentencePplRecord>(path)?
            .into_iter()
            .map(|r| (r.id, r.ppl))
            .collect(),
        None => HashMap::new(),
    };
    if let Some(endpoint) = &args.ppl_endpoint {
        let client = crate::config_client(settings, endpoint)?;
        let workers = settings.workers.min(client.max_in_flight());
        let results = run_batch(&samples, workers, |sample| {
            sentence_perplexities(&client, &sample.id, &sample.text)
        });
        // endpoint failures leave the sample missing-marked for imputation
        for (sample, result) in samples.iter().zip(results) {
            if let Ok(ppls) = result {
                ppl_by_id.insert(sample.id.clone(), ppls);
            }
        }
    }
    let annotations: Option<HashMap<String, AnnotationRecord>> = match &args.annotations {
        Some(path) => Some(
            read_jsonl::<AnnotationRecord>(path)?
                .into_iter()
                .map(|a| (a.sample_id.clone(), a))
                .collect(),
        ),
        None => None,
    };

    let mut vectors = Vec::with_capacity(samples.len());
    for sample in &samples {
        let fv = if args.extended {
            let ppl = ppl_by_id.get(&sample.id).map(Vec::as_slice);
            extractor.extended(&sample.id, &sample.text, ppl)?
        } else {
            extractor.classical(&sample.id, &sample.text)?
        };
        let fv = match &annotations {
            Some(map) => match map.get(&sample.id) {
                Some(record) => merge_annotations(&fv, record)?,
                None => merge_missing_annotations(&fv)?,
            },
            None => fv,
        };
        vectors.push(fv);
    }

    let out = settings.out_path(&args.output);
    write_feature_csv(&out, &vectors)?;
    println!(
        "samples={} features={} output={}",
        vectors.len(),
        vectors.first().map_or(0, |v| v.names.len()),
        out.display()
    );
    log_run(
        &settings.out_dir,
        &format!(
            "featurize samples={} extended={}",
            args.samples.display(),
            args.extended
        ),
    );
    Ok(())
}
