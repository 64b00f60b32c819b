//! train-clf: fit imputer + scaler on the training features, train the
//! logistic regression reference detector, persist all three artifacts,
//! and optionally predict a score file for another feature matrix.

use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use deteval_core::classifier::{predict_proba, save_model, train_logreg, TrainConfig};
use deteval_core::corpus::Label;
use deteval_core::features::{read_feature_csv, ImputerState, ScalerState};
use deteval_core::io::write_atomic;
use deteval_core::scorer::{write_score_file, ScoreRecord};

use crate::commands::common::{load_labels, log_run};
use crate::config::Settings;

#[derive(Debug, Args)]
pub struct TrainClfArgs {
    /// Training feature matrix CSV.
    #[arg(long)]
    pub features: PathBuf,
    /// Samples JSONL supplying the training labels by id.
    #[arg(long)]
    pub labels: PathBuf,
    /// Inverse regularization strength.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Feature matrix to score with the freshly trained model.
    #[arg(long)]
    pub predict: Option<PathBuf>,
    #[arg(long, default_value = "scores_clf.jsonl")]
    pub predict_output: String,
}

pub fn run(settings: &Settings, args: &TrainClfArgs) -> Result<()> {
    let vectors = read_feature_csv(&args.features)
        .with_context(|| format!("reading features from {}", args.features.display()))?;
    let labels_by_id: HashMap<String, Label> = load_labels(&args.labels)?;

    let mut labels = Vec::with_capacity(vectors.len());
    for fv in &vectors {
        let label = labels_by_id
            .get(&fv.sample_id)
            .with_context(|| format!("feature row {:?} has no label", fv.sample_id))?;
        labels.push(*label);
    }

    let imputer = ImputerState::fit(&vectors)?;
    let imputed: Vec<_> = vectors
        .iter()
        .map(|fv| imputer.apply(fv))
        .collect::<deteval_core::Result<_>>()?;
    let scaler = ScalerState::fit(&imputed)?;
    let scaled: Vec<_> = imputed
        .iter()
        .map(|fv| scaler.apply(fv))
        .collect::<deteval_core::Result<_>>()?;

    let config = TrainConfig {
        c: args.c,
        max_iter: args.max_iter,
        tol: args.tol,
        balanced: true,
    };
    let model = train_logreg(&scaled, &labels, config)?;

    save_model(&settings.out_path("model.json"), &model)?;
    write_atomic(
        &settings.out_path("imputer.json"),
        &serde_json::to_vec_pretty(&imputer)?,
    )?;
    write_atomic(
        &settings.out_path("scaler.json"),
        &serde_json::to_vec_pretty(&scaler)?,
    )?;

    println!(
        "trained n={} features={} iterations={} grad_norm={:.3e} converged={}",
        scaled.len(),
        model.feature_names.len(),
        model.train_metadata.iterations,
        model.train_metadata.final_grad_norm,
        model.train_metadata.converged
    );

    if let Some(predict_path) = &args.predict {
        let eval_vectors = read_feature_csv(predict_path)
            .with_context(|| format!("reading features from {}", predict_path.display()))?;
        if eval_vectors.is_empty() {
            bail!("nothing to predict in {}", predict_path.display());
        }
        let mut records = Vec::with_capacity(eval_vectors.len());
        for fv in &eval_vectors {
            let prepared = scaler.apply(&imputer.apply(fv)?)?;
            let score = predict_proba(&model, &prepared)?;
            records.push(ScoreRecord {
                id: fv.sample_id.clone(),
                raw: score,
                score,
                method: "logreg".into(),
            });
        }
        let out = settings.out_path(&args.predict_output);
        write_score_file(&out, &records)?;
        println!("predicted={} output={}", records.len(), out.display());
    }

    log_run(
        &settings.out_dir,
        &format!("train-clf features={}", args.features.display()),
    );
    Ok(())
}
