//! evaluate: join a score file with labels, compute the full metric suite,
//! optional bootstrap confidence intervals, and curve data CSVs.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use deteval_core::io::write_atomic;
use deteval_core::metrics::{bootstrap_ci, CurveData, MetricName, MetricReport};
use deteval_core::scorer::read_score_file;

use crate::commands::common::{
    join_scores, load_labels, log_run, write_curve_csvs, write_metric_csv, MetricRow,
};
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Score file (JSON Lines) to evaluate.
    #[arg(long)]
    pub scores: PathBuf,
    /// Samples JSONL supplying labels by id.
    #[arg(long)]
    pub labels: PathBuf,
    /// Evaluation condition name recorded in the output row
    /// (e.g. hc3_to_hc3).
    #[arg(long, default_value = "default")]
    pub condition: String,
    /// Detector name recorded in the output row.
    #[arg(long, default_value = "detector")]
    pub detector: String,
    /// Metrics to wrap in 1,000-iteration bootstrap confidence intervals
    /// (repeatable flag).
    #[arg(long = "ci-metric")]
    pub ci_metrics: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub iterations: u32,
    /// Also write ROC / PR / calibration curve CSVs.
    #[arg(long)]
    pub curves: bool,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long, default_value = "metrics.csv")]
    pub output: String,
}

pub fn run(settings: &Settings, args: &EvaluateArgs) -> Result<()> {
    let records = read_score_file(&args.scores)
        .with_context(|| format!("reading scores from {}", args.scores.display()))?;
    let labels = load_labels(&args.labels)?;
    let samples = join_scores(&records, &labels)?;

    let report = MetricReport::compute(&samples)?;
    let row = MetricRow {
        condition: args.condition.clone(),
        detector: args.detector.clone(),
        report,
    };
    let out = settings.out_path(&args.output);
    write_metric_csv(&out, &[row])?;
    println!(
        "condition={} detector={} n={} auroc={:.6} output={}",
        args.condition,
        args.detector,
        samples.len(),
        deteval_core::metrics::auroc(&samples)?,
        out.display()
    );

    if !args.ci_metrics.is_empty() {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        writer.write_record(["metric", "point", "lo", "hi", "iterations", "seed", "level"])?;
        for name in &args.ci_metrics {
            let metric: MetricName = name.parse::<MetricName>()?;
            let ci = bootstrap_ci(&samples, metric, args.iterations, settings.seed)?;
            writer.write_record([
                metric.as_str().to_string(),
                format!("{}", ci.point),
                format!("{}", ci.lo),
                format!("{}", ci.hi),
                format!("{}", ci.iterations),
                format!("{}", ci.seed),
                format!("{}", ci.level),
            ])?;
            println!(
                "ci metric={} point={:.6} lo={:.6} hi={:.6}",
                metric.as_str(),
                ci.point,
                ci.lo,
                ci.hi
            );
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        write_atomic(
            &settings.out_path(&format!("{}_ci.csv", args.condition)),
            &bytes,
        )?;
    }

    if args.curves {
        let curves = CurveData::compute(&samples, args.bins)?;
        write_curve_csvs(&settings.out_dir, &args.condition, &curves)?;
    }

    log_run(
        &settings.out_dir,
        &format!(
            "evaluate scores={} condition={}",
            args.scores.display(),
            args.condition
        ),
    );
    Ok(())
}
