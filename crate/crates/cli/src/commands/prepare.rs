//! prepare: pairs JSONL -> dedup -> length match -> flatten -> stratified
//! split -> train/test JSONL, with counts echoed on stdout.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use deteval_core::corpus::{
    dedup_pairs, flatten_binary, length_match, read_pairs, stratified_split, write_pairs,
    write_samples,
};

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Pair records, one JSON object per line.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Length-matching tolerance as a fraction of the human word count.
    #[arg(long, default_value_t = 0.20)]
    pub tolerance: f64,
    /// Train fraction of the stratified split.
    #[arg(long, default_value_t = 0.8)]
    pub ratio: f64,
}

pub fn run(settings: &Settings, args: &PrepareArgs) -> Result<()> {
    let pairs = read_pairs(&args.pairs)
        .with_context(|| format!("reading pairs from {}", args.pairs.display()))?;
    let total = pairs.len();

    let deduped = dedup_pairs(pairs);
    let n_deduped = deduped.len();

    let (kept, report) = length_match(deduped, args.tolerance)?;
    let samples = flatten_binary(&kept);
    let split = stratified_split(&samples, args.ratio, settings.seed)?;

    write_pairs(&settings.out_path("pairs_kept.jsonl"), &kept)?;
    write_samples(&settings.out_path("train.jsonl"), &split.train)?;
    write_samples(&settings.out_path("test.jsonl"), &split.test)?;

    println!(
        "pairs={total} deduped={n_deduped} length_matched={} dropped={} zero_word={} samples={} train={} test={}",
        report.retained,
        report.dropped_out_of_tolerance,
        report.zero_word_pairs.len(),
        samples.len(),
        split.train.len(),
        split.test.len()
    );
    log_run(
        &settings.out_dir,
        &format!(
            "prepare pairs={} seed={}",
            args.pairs.display(),
            settings.seed
        ),
    );
    Ok(())
}
