//! Reference supervised detector: L2-regularized logistic regression with
//! balanced class weights, trained by deterministic full-batch gradient
//! descent with backtracking line search.
//!
//! The objective is mean weighted cross-entropy plus (1/(2C))·||w||², bias
//! unregularized, balanced weight n_total/(2·n_c) per class. Training is
//! deterministic from zero initialization, so runs are reproducible and
//! the analytic gradient is directly checkable against finite differences.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::io::write_atomic;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub balanced: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            max_iter: 2000,
            tol: 1e-8,
            balanced: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainMetadata {
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub final_objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
    pub train_metadata: TrainMetadata,
}

/// The training objective as an explicit, testable object.
pub struct TrainingProblem {
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
    sample_weights: Vec<f64>,
    c: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable -[y ln s(z) + (1-y) ln(1-s(z))].
fn cross_entropy(z: f64, y: f64) -> f64 {
    z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
}

impl TrainingProblem {
    pub fn new(vectors: &[FeatureVector], labels: &[Label], config: &TrainConfig) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} vectors vs {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidInput("no training data".into()))?;
        let n_llm = labels.iter().filter(|l| **l == Label::Llm).count();
        let n_human = labels.len() - n_llm;
        if n_llm == 0 {
            return Err(Error::SingleClass("human".into()));
        }
        if n_human == 0 {
            return Err(Error::SingleClass("llm".into()));
        }

        let n = labels.len() as f64;
        let weight_for = |label: Label| -> f64 {
            if !config.balanced {
                return 1.0;
            }
            match label {
                Label::Human => n / (2.0 * n_human as f64),
                Label::Llm => n / (2.0 * n_llm as f64),
            }
        };

        let mut rows = Vec::with_capacity(vectors.len());
        for fv in vectors {
            if fv.names != first.names {
                return Err(Error::FeatureMismatch(format!(
                    "vector {} disagrees with the training feature set",
                    fv.sample_id
                )));
            }
            if fv.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "vector {} has non-finite features; impute before training",
                    fv.sample_id
                )));
            }
            rows.push(fv.values.clone());
        }
        Ok(TrainingProblem {
            rows,
            targets: labels
                .iter()
                .map(|l| if *l == Label::Llm { 1.0 } else { 0.0 })
                .collect(),
            sample_weights: labels.iter().map(|l| weight_for(*l)).collect(),
            c: config.c,
        })
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    /// Mean weighted cross-entropy plus the L2 term (bias unregularized).
    pub fn objective(&self, weights: &[f64], bias: f64) -> f64 {
        let n = self.rows.len() as f64;
        let mut loss = 0.0;
        for ((row, &y), &omega) in self
            .rows
            .iter()
            .zip(&self.targets)
            .zip(&self.sample_weights)
        {
            let z: f64 = row.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias;
            loss += omega * cross_entropy(z, y);
        }
        let l2: f64 = weights.iter().map(|w| w * w).sum::<f64>() / (2.0 * self.c);
        loss / n + l2
    }

    /// Analytic gradient of [`objective`] with respect to (weights, bias).
    pub fn gradient(&self, weights: &[f64], bias: f64) -> (Vec<f64>, f64) {
        let n = self.rows.len() as f64;
        let mut grad_w = vec![0.0; weights.len()];
        let mut grad_b = 0.0;
        for ((row, &y), &omega) in self
            .rows
            .iter()
            .zip(&self.targets)
            .zip(&self.sample_weights)
        {
            let z: f64 = row.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias;
            let residual = omega * (sigmoid(z) - y);
            for (g, x) in grad_w.iter_mut().zip(row) {
                *g += residual * x;
            }
            grad_b += residual;
        }
        for (g, w) in grad_w.iter_mut().zip(weights) {
            *g = *g / n + w / self.c;
        }
        (grad_w, grad_b / n)
    }
}

fn inf_norm(v: &[f64], extra: f64) -> f64 {
    v.iter().map(|x| x.abs()).fold(extra.abs(), f64::max)
}

/// Train by full-batch gradient descent with Armijo backtracking from zero
/// initialization; stops when the gradient infinity-norm drops below tol
/// or max_iter is reached.
pub fn train_logreg(
    vectors: &[FeatureVector],
    labels: &[Label],
    config: TrainConfig,
) -> Result<LogisticModel> {
    let problem = TrainingProblem::new(vectors, labels, &config)?;
    let dim = problem.dim();
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut objective = problem.objective(&weights, bias);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    const ARMIJO: f64 = 1e-4;
    const SHRINK: f64 = 0.5;
    const GROW: f64 = 2.0;
    const MIN_STEP: f64 = 1e-18;

    for iter in 0..config.max_iter {
        let (grad_w, grad_b) = problem.gradient(&weights, bias);
        grad_norm = inf_norm(&grad_w, grad_b);
        if grad_norm < config.tol {
            iterations = iter;
            break;
        }
        let grad_sq: f64 = grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;

        step *= GROW;
        let mut accepted = false;
        while step >= MIN_STEP {
            let trial_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let trial_b = bias - step * grad_b;
            let trial_obj = problem.objective(&trial_w, trial_b);
            if trial_obj <= objective - ARMIJO * step * grad_sq {
                weights = trial_w;
                bias = trial_b;
                objective = trial_obj;
                accepted = true;
                break;
            }
            step *= SHRINK;
        }
        iterations = iter + 1;
        if !accepted {
            break; // no descent direction at float resolution
        }
    }

    let converged = grad_norm < config.tol;
    Ok(LogisticModel {
        feature_names: vectors[0].names.clone(),
        weights,
        bias,
        config,
        train_metadata: TrainMetadata {
            iterations,
            final_grad_norm: grad_norm,
            final_objective: objective,
            converged,
        },
    })
}

/// P(llm) = sigmoid(w·x + b); feature names must align exactly.
pub fn predict_proba(model: &LogisticModel, fv: &FeatureVector) -> Result<f64> {
    if model.feature_names != fv.names {
        return Err(Error::FeatureMismatch(format!(
            "vector {} does not match the model's feature set",
            fv.sample_id
        )));
    }
    let z: f64 = fv
        .values
        .iter()
        .zip(&model.weights)
        .map(|(x, w)| x * w)
        .sum::<f64>()
        + model.bias;
    Ok(sigmoid(z))
}

pub fn save_model(path: &Path, model: &LogisticModel) -> Result<()> {
    let json = serde_json::to_vec_pretty(model)?;
    write_atomic(path, &json)
}

pub fn load_model(path: &Path) -> Result<LogisticModel> {
    let content = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&content)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fv(id: &str, values: Vec<f64>) -> FeatureVector {
        let names = (0..values.len()).map(|i| format!("f{i}")).collect();
        FeatureVector::new(id, names, values).unwrap()
    }

    fn toy_1d() -> (Vec<FeatureVector>, Vec<Label>) {
        (
            vec![fv("a", vec![-1.0]), fv("b", vec![1.0])],
            vec![Label::Human, Label::Llm],
        )
    }

    #[test]
    fn separable_toy_gets_positive_weight_and_perfect_auroc() {
        let (x, y) = toy_1d();
        let model = train_logreg(&x, &y, TrainConfig::default()).unwrap();
        assert!(model.weights[0] > 0.0);
        let s_neg = predict_proba(&model, &x[0]).unwrap();
        let s_pos = predict_proba(&model, &x[1]).unwrap();
        assert!(s_pos > s_neg, "training AUROC must be 1.0");
    }

    #[test]
    fn two_point_problem_matches_bisection_oracle() {
        // Symmetric instance: optimum solves w/C = sigmoid(-w), b = 0.
        let (x, y) = toy_1d();
        let model = train_logreg(&x, &y, TrainConfig::default()).unwrap();

        let f = |w: f64| w / 1.0 - sigmoid(-w);
        let (mut lo, mut hi) = (0.0, 1.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!(
            (model.weights[0] - oracle).abs() < 1e-4,
            "trained {} vs oracle {oracle}",
            model.weights[0]
        );
        assert!(model.bias.abs() < 1e-6);
    }

    #[test]
    fn uniform_duplication_is_invariant() {
        let x = vec![
            fv("a", vec![-1.2, 0.3]),
            fv("b", vec![0.8, -0.1]),
            fv("c", vec![-0.5, 0.9]),
            fv("d", vec![1.1, 0.4]),
        ];
        let y = vec![Label::Human, Label::Llm, Label::Human, Label::Llm];
        let base = train_logreg(&x, &y, TrainConfig::default()).unwrap();

        let mut x2 = x.clone();
        x2.extend(x.iter().cloned());
        let mut y2 = y.clone();
        y2.extend(y.iter().cloned());
        let doubled = train_logreg(&x2, &y2, TrainConfig::default()).unwrap();

        for (a, b) in base.weights.iter().zip(&doubled.weights) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert!((base.bias - doubled.bias).abs() < 1e-6);
    }

    #[test]
    fn minority_duplication_equals_balanced_weighting() {
        // 6-point instance: 4 human, 2 llm. Balanced weighting on the
        // original must equal uniform weighting on the llm-doubled set.
        let x = vec![
            fv("h1", vec![-1.0, 0.2]),
            fv("h2", vec![-0.6, -0.4]),
            fv("h3", vec![-1.4, 0.1]),
            fv("h4", vec![-0.2, -0.8]),
            fv("l1", vec![0.9, 0.5]),
            fv("l2", vec![1.3, -0.2]),
        ];
        let y = vec![
            Label::Human,
            Label::Human,
            Label::Human,
            Label::Human,
            Label::Llm,
            Label::Llm,
        ];
        let balanced = train_logreg(&x, &y, TrainConfig::default()).unwrap();

        let mut x_dup = x.clone();
        x_dup.push(x[4].clone());
        x_dup.push(x[5].clone());
        let mut y_dup = y.clone();
        y_dup.push(Label::Llm);
        y_dup.push(Label::Llm);
        let uniform = train_logreg(
            &x_dup,
            &y_dup,
            TrainConfig {
                balanced: false,
                ..TrainConfig::default()
            },
        )
        .unwrap();

        for (a, b) in balanced.weights.iter().zip(&uniform.weights) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert!((balanced.bias - uniform.bias).abs() < 1e-6);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let x: Vec<FeatureVector> = (0..12)
            .map(|i| {
                fv(
                    &format!("s{i}"),
                    (0..4).map(|_| rng.random_range(-2.0..2.0)).collect(),
                )
            })
            .collect();
        let y: Vec<Label> = (0..12)
            .map(|i| if i % 3 == 0 { Label::Llm } else { Label::Human })
            .collect();
        let problem = TrainingProblem::new(&x, &y, &TrainConfig::default()).unwrap();

        let h = 1e-6;
        for _ in 0..20 {
            let w: Vec<f64> = (0..4).map(|_| rng.random_range(-1.5..1.5)).collect();
            let b: f64 = rng.random_range(-1.0..1.0);
            let (grad_w, grad_b) = problem.gradient(&w, b);
            for j in 0..4 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let numeric = (problem.objective(&wp, b) - problem.objective(&wm, b)) / (2.0 * h);
                let rel = (grad_w[j] - numeric).abs() / grad_w[j].abs().max(1e-8);
                assert!(
                    rel < 1e-5,
                    "dim {j}: analytic {} numeric {numeric}",
                    grad_w[j]
                );
            }
            let numeric_b =
                (problem.objective(&w, b + h) - problem.objective(&w, b - h)) / (2.0 * h);
            let rel_b = (grad_b - numeric_b).abs() / grad_b.abs().max(1e-8);
            assert!(rel_b < 1e-5);
        }
    }

    #[test]
    fn objective_nonincreasing_over_training() {
        // re-run the optimizer loop manually and watch the objective
        let x = vec![
            fv("a", vec![-1.0, 2.0]),
            fv("b", vec![1.5, -0.5]),
            fv("c", vec![0.3, 0.8]),
            fv("d", vec![-0.7, -1.2]),
        ];
        let y = vec![Label::Human, Label::Llm, Label::Llm, Label::Human];
        let config = TrainConfig::default();
        let problem = TrainingProblem::new(&x, &y, &config).unwrap();
        let mut w = vec![0.0; 2];
        let mut b = 0.0;
        let mut prev = problem.objective(&w, b);
        let mut step = 1.0;
        for _ in 0..50 {
            let (gw, gb) = problem.gradient(&w, b);
            let gsq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
            step *= 2.0;
            loop {
                let tw: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect();
                let tb = b - step * gb;
                let obj = problem.objective(&tw, tb);
                if obj <= prev - 1e-4 * step * gsq {
                    assert!(obj <= prev + 1e-15);
                    w = tw;
                    b = tb;
                    prev = obj;
                    break;
                }
                step *= 0.5;
            }
        }
    }

    #[test]
    fn prediction_closed_forms() {
        let model = LogisticModel {
            feature_names: vec!["x".into()],
            weights: vec![0.0],
            bias: 0.0,
            config: TrainConfig::default(),
            train_metadata: TrainMetadata {
                iterations: 0,
                final_grad_norm: 0.0,
                final_objective: 0.0,
                converged: true,
            },
        };
        let v = fv("s", vec![123.0]);
        let v = FeatureVector::new("s", vec!["x".into()], v.values).unwrap();
        assert_eq!(predict_proba(&model, &v).unwrap(), 0.5);

        // w*x + b = ln 3 -> 0.75
        let mut m = model.clone();
        m.weights = vec![3.0f64.ln()];
        let unit = FeatureVector::new("s", vec!["x".into()], vec![1.0]).unwrap();
        assert!((predict_proba(&m, &unit).unwrap() - 0.75).abs() < 1e-12);

        // negation antisymmetry
        let mut neg = m.clone();
        neg.weights = vec![-m.weights[0]];
        neg.bias = -m.bias;
        let p = predict_proba(&m, &unit).unwrap();
        let q = predict_proba(&neg, &unit).unwrap();
        assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feature_permutation_invariance() {
        let x = vec![
            fv("a", vec![-1.0, 0.5, 2.0]),
            fv("b", vec![1.0, -0.5, 1.0]),
            fv("c", vec![0.2, 1.5, -1.0]),
            fv("d", vec![0.4, -1.5, 0.3]),
        ];
        let y = vec![Label::Human, Label::Llm, Label::Human, Label::Llm];
        let model = train_logreg(&x, &y, TrainConfig::default()).unwrap();
        let probe = fv("p", vec![0.7, -0.3, 1.1]);
        let direct = predict_proba(&model, &probe).unwrap();

        // permute features [2, 0, 1] consistently in model and input
        let perm = [2usize, 0, 1];
        let permuted_model = LogisticModel {
            feature_names: perm
                .iter()
                .map(|&i| model.feature_names[i].clone())
                .collect(),
            weights: perm.iter().map(|&i| model.weights[i]).collect(),
            ..model.clone()
        };
        let permuted_probe = FeatureVector::new(
            "p",
            perm.iter().map(|&i| probe.names[i].clone()).collect(),
            perm.iter().map(|&i| probe.values[i]).collect(),
        )
        .unwrap();
        let permuted = predict_proba(&permuted_model, &permuted_probe).unwrap();
        assert!((direct - permuted).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = vec![fv("a", vec![1.0])];
        assert!(train_logreg(&x, &[Label::Llm], TrainConfig::default()).is_err());
        let x2 = vec![fv("a", vec![f64::NAN]), fv("b", vec![1.0])];
        assert!(train_logreg(&x2, &[Label::Human, Label::Llm], TrainConfig::default()).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let (x, y) = toy_1d();
        let model = train_logreg(&x, &y, TrainConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back.weights, model.weights);
        assert_eq!(back.bias, model.bias);
        assert_eq!(back.feature_names, model.feature_names);
    }
}
