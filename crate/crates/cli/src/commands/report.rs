//! report: merge per-condition metric CSVs into the four-condition grid,
//! emit an AUROC heatmap over detectors x conditions, and render optional
//! SVG curve plots.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::io::write_atomic;

use crate::commands::common::log_run;
use crate::commands::common::{metric_record, read_metric_csv, MetricRow, METRIC_HEADER};
use crate::config::Settings;
use crate::svg;

/// Canonical row order of the condition grid; unknown conditions follow
/// alphabetically.
const CONDITION_ORDER: [&str; 4] = ["hc3_to_hc3", "hc3_to_eli5", "eli5_to_eli5", "eli5_to_hc3"];

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Metric CSVs produced by `evaluate` (repeatable).
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also write an AUROC heatmap grid (detector rows x condition columns).
    #[arg(long)]
    pub heatmap: bool,
    /// ROC curve CSV (fpr,tpr,threshold) to render as SVG.
    #[arg(long)]
    pub roc_svg: Option<PathBuf>,
    /// Calibration curve CSV to render as SVG.
    #[arg(long)]
    pub calibration_svg: Option<PathBuf>,
    #[arg(long, default_value = "report.csv")]
    pub output: String,
}

fn condition_rank(condition: &str) -> (usize, String) {
    match CONDITION_ORDER.iter().position(|c| *c == condition) {
        Some(i) => (i, String::new()),
        None => (CONDITION_ORDER.len(), condition.to_string()),
    }
}

pub fn run(settings: &Settings, args: &ReportArgs) -> Result<()> {
    let mut rows: Vec<MetricRow> = Vec::new();
    for input in &args.inputs {
        let mut batch = read_metric_csv(input)
            .with_context(|| format!("reading metric csv {}", input.display()))?;
        rows.append(&mut batch);
    }
    if rows.is_empty() {
        bail!("no metric rows in the inputs");
    }
    rows.sort_by(|a, b| {
        condition_rank(&a.condition)
            .cmp(&condition_rank(&b.condition))
            .then_with(|| a.detector.cmp(&b.detector))
    });

    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(METRIC_HEADER)?;
    for row in &rows {
        writer.write_record(metric_record(row))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let out = settings.out_path(&args.output);
    write_atomic(&out, &bytes)?;
    println!("rows={} output={}", rows.len(), out.display());

    if args.heatmap {
        let mut detectors: Vec<String> = rows.iter().map(|r| r.detector.clone()).collect();
        detectors.sort();
        detectors.dedup();
        let mut conditions: Vec<String> = rows.iter().map(|r| r.condition.clone()).collect();
        conditions.sort_by_key(|c| condition_rank(c));
        conditions.dedup();

        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header = vec!["detector".to_string()];
        header.extend(conditions.iter().cloned());
        writer.write_record(&header)?;
        for detector in &detectors {
            let mut record = vec![detector.clone()];
            for condition in &conditions {
                let cell = rows
                    .iter()
                    .find(|r| &r.detector == detector && &r.condition == condition)
                    .map(|r| format!("{}", r.report.auroc))
                    .unwrap_or_default();
                record.push(cell);
            }
            writer.write_record(&record)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        let heatmap_path = settings.out_path("heatmap.csv");
        write_atomic(&heatmap_path, &bytes)?;

        let cells: Vec<Vec<Option<f64>>> = detectors
            .iter()
            .map(|detector| {
                conditions
                    .iter()
                    .map(|condition| {
                        rows.iter()
                            .find(|r| &r.detector == detector && &r.condition == condition)
                            .map(|r| r.report.auroc)
                    })
                    .collect()
            })
            .collect();
        let svg = svg::heatmap(&detectors, &conditions, &cells, "AUROC");
        write_atomic(&settings.out_path("heatmap.svg"), svg.as_bytes())?;
        println!(
            "heatmap detectors={} conditions={} output={}",
            detectors.len(),
            conditions.len(),
            heatmap_path.display()
        );
    }

    if let Some(path) = &args.roc_svg {
        let points = read_xy_csv(path, "fpr", "tpr")?;
        let svg = svg::unit_line_plot(&points, "ROC", "FPR", "TPR");
        write_atomic(&settings.out_path("roc.svg"), svg.as_bytes())?;
    }
    if let Some(path) = &args.calibration_svg {
        let points = read_xy_csv(path, "mean_score", "empirical_positive_rate")?;
        let svg = svg::unit_line_plot(&points, "Calibration", "Mean score", "Empirical llm rate");
        write_atomic(&settings.out_path("calibration.svg"), svg.as_bytes())?;
    }

    log_run(
        &settings.out_dir,
        &format!("report inputs={}", args.inputs.len()),
    );
    Ok(())
}

fn read_xy_csv(path: &PathBuf, x_col: &str, y_col: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?.clone();
    let x_idx = header
        .iter()
        .position(|h| h == x_col)
        .with_context(|| format!("{}: missing column {x_col:?}", path.display()))?;
    let y_idx = header
        .iter()
        .position(|h| h == y_col)
        .with_context(|| format!("{}: missing column {y_col:?}", path.display()))?;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let x: f64 = record.get(x_idx).unwrap_or("").parse()?;
        let y: f64 = record.get(y_idx).unwrap_or("").parse()?;
        points.push((x, y));
    }
    Ok(points)
}
