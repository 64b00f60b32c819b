//! Shared helpers for the pipeline commands: label joins, metric CSV rows,
//! curve CSV export, and the sidecar run log.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use deteval_core::corpus::{read_samples, Label};
use deteval_core::io::write_atomic;
use deteval_core::metrics::{CurveData, MetricReport, ScoredSample};
use deteval_core::scorer::ScoreRecord;

/// id -> label map from a samples JSONL file.
pub fn load_labels(path: &Path) -> Result<HashMap<String, Label>> {
    let samples = read_samples(path)?;
    Ok(samples.into_iter().map(|s| (s.id, s.label)).collect())
}

/// Join a score file with labels by id; ids without a label are an error,
/// so silent misalignment cannot skew metrics.
pub fn join_scores(
    records: &[ScoreRecord],
    labels: &HashMap<String, Label>,
) -> Result<Vec<ScoredSample>> {
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let label = labels
            .get(&record.id)
            .with_context(|| format!("score id {:?} has no label", record.id))?;
        out.push(ScoredSample::new(record.id.clone(), *label, record.score)?);
    }
    Ok(out)
}

pub const METRIC_HEADER: [&str; 16] = [
    "condition",
    "detector",
    "auroc",
    "auprc",
    "eer",
    "brier",
    "log_loss",
    "fpr_at_95tpr",
    "acc_at_05",
    "acc_at_median",
    "acc_at_optimal",
    "optimal_threshold",
    "separation",
    "detection_rate",
    "n_human",
    "n_llm",
];

#[derive(Debug, Clone)]
pub struct MetricRow {
    pub condition: String,
    pub detector: String,
    pub report: MetricReport,
}

pub fn metric_record(row: &MetricRow) -> Vec<String> {
    let r = &row.report;
    vec![
        row.condition.clone(),
        row.detector.clone(),
        format!("{}", r.auroc),
        format!("{}", r.auprc),
        format!("{}", r.eer),
        format!("{}", r.brier),
        format!("{}", r.log_loss),
        format!("{}", r.fpr_at_95tpr),
        format!("{}", r.acc_at_05),
        format!("{}", r.acc_at_median),
        format!("{}", r.acc_at_optimal),
        format!("{}", r.optimal_threshold),
        format!("{}", r.separation),
        format!("{}", r.detection_rate),
        format!("{}", r.n_human),
        format!("{}", r.n_llm),
    ]
}

pub fn write_metric_csv(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(METRIC_HEADER)?;
    for row in rows {
        writer.write_record(metric_record(row))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    write_atomic(path, &bytes)?;
    Ok(())
}

/// Read a metric CSV produced by [`write_metric_csv`] back into rows.
pub fn read_metric_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?.clone();
    let expected: Vec<&str> = METRIC_HEADER.to_vec();
    let actual: Vec<&str> = header.iter().collect();
    if actual != expected {
        bail!(
            "{}: metric csv header mismatch (got {:?})",
            path.display(),
            actual
        );
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .with_context(|| "short metric row")?
                .parse::<f64>()
                .with_context(|| format!("bad numeric field {i}"))
        };
        rows.push(MetricRow {
            condition: record.get(0).unwrap_or_default().to_string(),
            detector: record.get(1).unwrap_or_default().to_string(),
            report: MetricReport {
                auroc: field(2)?,
                auprc: field(3)?,
                eer: field(4)?,
                brier: field(5)?,
                log_loss: field(6)?,
                fpr_at_95tpr: field(7)?,
                acc_at_05: field(8)?,
                acc_at_median: field(9)?,
                acc_at_optimal: field(10)?,
                optimal_threshold: field(11)?,
                separation: field(12)?,
                detection_rate: field(13)?,
                n_human: field(14)? as usize,
                n_llm: field(15)? as usize,
            },
        });
    }
    Ok(rows)
}

/// Write ROC, PR, and calibration curve CSVs next to each other.
pub fn write_curve_csvs(dir: &Path, stem: &str, curves: &CurveData) -> Result<()> {
    let mut roc = csv::WriterBuilder::new().from_writer(Vec::new());
    roc.write_record(["fpr", "tpr", "threshold"])?;
    for (fpr, tpr, threshold) in &curves.roc_points {
        roc.write_record([format!("{fpr}"), format!("{tpr}"), format!("{threshold}")])?;
    }
    write_atomic(
        &dir.join(format!("{stem}_roc.csv")),
        &roc.into_inner()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?,
    )?;

    let mut pr = csv::WriterBuilder::new().from_writer(Vec::new());
    pr.write_record(["recall", "precision"])?;
    for (recall, precision) in &curves.pr_points {
        pr.write_record([format!("{recall}"), format!("{precision}")])?;
    }
    write_atomic(
        &dir.join(format!("{stem}_pr.csv")),
        &pr.into_inner()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?,
    )?;

    let mut cal = csv::WriterBuilder::new().from_writer(Vec::new());
    cal.write_record([
        "bin_center",
        "mean_score",
        "empirical_positive_rate",
        "count",
    ])?;
    for bin in &curves.calibration_bins {
        cal.write_record([
            format!("{}", bin.bin_center),
            format!("{}", bin.mean_score),
            format!("{}", bin.empirical_positive_rate),
            format!("{}", bin.count),
        ])?;
    }
    write_atomic(
        &dir.join(format!("{stem}_calibration.csv")),
        &cal.into_inner()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?,
    )?;
    Ok(())
}

/// Append one line to the sidecar run log. Timestamps live here and only
/// here; primary outputs stay byte-reproducible.
pub fn log_run(dir: &Path, line: &str) {
    use std::io::Write;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    if let Ok(mut file) = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("run.log"))
    {
        let _ = writeln!(file, "{stamp} {line}");
    }
}
