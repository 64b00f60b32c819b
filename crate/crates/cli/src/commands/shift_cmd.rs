//! shift: PCA-project reference and comparison embeddings, fit Gaussians,
//! and report KL / Wasserstein-2 / Fréchet distances; optionally correlate
//! a distance column against detector degradation.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::io::write_atomic;
use deteval_core::shift::{
    default_ridge, fit_gaussian, fit_pca, project, read_embedding_bin, read_embedding_csv,
    spearman, Matrix, ShiftReport, DEFAULT_PCA_DIM,
};

use crate::commands::common::log_run;
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct ShiftArgs {
    /// Reference embeddings (.csv with id column, or the binary matrix
    /// format). The PCA basis is fitted on these rows only.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Comparison embeddings in either format.
    #[arg(long)]
    pub comparison: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PCA_DIM)]
    pub dim: usize,
    /// Covariance ridge; "auto" scales with the mean diagonal.
    #[arg(long, default_value = "auto")]
    pub ridge: String,
    /// CSV with `distance` and `drop` columns for Spearman correlation.
    #[arg(long)]
    pub correlate: Option<PathBuf>,
    #[arg(long, default_value = "shift.csv")]
    pub output: String,
}

fn load_embeddings(path: &Path) -> Result<Matrix> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => Ok(read_embedding_bin(path)?),
        _ => Ok(read_embedding_csv(path)?.1),
    }
}

fn run_distances(settings: &Settings, args: &ShiftArgs) -> Result<()> {
    let (Some(reference_path), Some(comparison_path)) = (&args.reference, &args.comparison) else {
        return Ok(());
    };
    let reference = load_embeddings(reference_path)
        .with_context(|| format!("reading {}", reference_path.display()))?;
    let comparison = load_embeddings(comparison_path)
        .with_context(|| format!("reading {}", comparison_path.display()))?;

    let dim = args.dim.min(reference.cols);
    let pca = fit_pca(&reference, dim)?;
    let ref_proj = project(&pca, &reference)?;
    let cmp_proj = project(&pca, &comparison)?;

    // one ridge magnitude, derived from the reference projection, applied
    // to both fits so the distances compare like with like
    let ridge = match args.ridge.as_str() {
        "auto" => default_ridge(&ref_proj)?,
        value => value
            .parse::<f64>()
            .with_context(|| format!("--ridge {value:?} is neither auto nor a number"))?,
    };
    let p = fit_gaussian(&cmp_proj, ridge)?;
    let q = fit_gaussian(&ref_proj, ridge)?;
    let report = ShiftReport::compute(&p, &q)?;

    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record([
        "kl",
        "w2",
        "frechet",
        "dim",
        "ridge",
        "n_reference",
        "n_comparison",
    ])?;
    writer.write_record([
        format!("{}", report.kl),
        format!("{}", report.w2),
        format!("{}", report.frechet),
        format!("{dim}"),
        format!("{ridge}"),
        format!("{}", reference.rows),
        format!("{}", comparison.rows),
    ])?;
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let out = settings.out_path(&args.output);
    write_atomic(&out, &bytes)?;
    println!(
        "kl={:.6} w2={:.6} frechet={:.6} dim={dim} output={}",
        report.kl,
        report.w2,
        report.frechet,
        out.display()
    );
    Ok(())
}

fn run_correlation(settings: &Settings, path: &Path) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{}: missing column {name:?}", path.display()))
    };
    let distance_col = col("distance")?;
    let drop_col = col("drop")?;
    let mut distances = Vec::new();
    let mut drops = Vec::new();
    for record in reader.records() {
        let record = record?;
        distances.push(record.get(distance_col).unwrap_or("").parse::<f64>()?);
        drops.push(record.get(drop_col).unwrap_or("").parse::<f64>()?);
    }
    let result = spearman(&distances, &drops)?;
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(["rho", "p_value", "n"])?;
    writer.write_record([
        format!("{}", result.rho),
        format!("{}", result.p_value),
        format!("{}", result.n),
    ])?;
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let out = settings.out_path("correlation.csv");
    write_atomic(&out, &bytes)?;
    println!(
        "rho={:.4} p={:.4} n={} output={}",
        result.rho,
        result.p_value,
        result.n,
        out.display()
    );
    Ok(())
}

pub fn run(settings: &Settings, args: &ShiftArgs) -> Result<()> {
    let has_pair = args.reference.is_some() && args.comparison.is_some();
    if !has_pair && args.correlate.is_none() {
        bail!("shift needs --reference and --comparison, or --correlate");
    }
    run_distances(settings, args)?;
    if let Some(path) = &args.correlate {
        run_correlation(settings, path)?;
    }
    log_run(&settings.out_dir, "shift");
    Ok(())
}
