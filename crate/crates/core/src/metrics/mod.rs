//! The unified evaluation suite over detectability scores: ranking metrics,
//! calibration metrics, threshold accuracies, separation, detection rate,
//! bootstrap confidence intervals, and curve data.
//!
//! Every metric consumes [`ScoredSample`]s — (id, label, score in [0,1]) —
//! and classifies with the strict rule "score > threshold means llm".

mod bootstrap;
mod curves;

pub use bootstrap::{bootstrap_ci, BootstrapCi, MetricName};
pub use curves::{calibration_curve, pr_curve, roc_curve, CalibrationBin, CurveData};

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

const LOG_CLIP: f64 = 1e-15;

/// One scored prediction: the universal metric input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredSample {
    pub id: String,
    pub label: Label,
    pub score: f64,
}

impl ScoredSample {
    pub fn new(id: impl Into<String>, label: Label, score: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidInput(format!("score {score} outside [0,1]")));
        }
        Ok(ScoredSample {
            id: id.into(),
            label,
            score,
        })
    }

    pub fn is_positive(&self) -> bool {
        self.label == Label::Llm
    }
}

/// Full metric row for one evaluation condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub auroc: f64,
    pub auprc: f64,
    pub eer: f64,
    pub brier: f64,
    pub log_loss: f64,
    pub fpr_at_95tpr: f64,
    pub acc_at_05: f64,
    pub acc_at_median: f64,
    pub acc_at_optimal: f64,
    pub optimal_threshold: f64,
    pub separation: f64,
    pub detection_rate: f64,
    pub n_human: usize,
    pub n_llm: usize,
}

impl MetricReport {
    /// Compute every metric of the suite over one sample set.
    pub fn compute(samples: &[ScoredSample]) -> Result<Self> {
        let (acc_at_05, acc_at_median, acc_at_optimal, optimal_threshold) =
            accuracy_thresholds(samples)?;
        let (n_human, n_llm) = class_counts(samples);
        Ok(MetricReport {
            auroc: auroc(samples)?,
            auprc: auprc(samples)?,
            eer: eer(samples)?,
            brier: brier(samples),
            log_loss: log_loss(samples),
            fpr_at_95tpr: fpr_at_tpr(samples, 0.95)?,
            acc_at_05,
            acc_at_median,
            acc_at_optimal,
            optimal_threshold,
            separation: separation(samples)?,
            detection_rate: detection_rate(samples)?,
            n_human,
            n_llm,
        })
    }
}

fn class_counts(samples: &[ScoredSample]) -> (usize, usize) {
    let n_llm = samples.iter().filter(|s| s.is_positive()).count();
    (samples.len() - n_llm, n_llm)
}

fn require_both_classes(samples: &[ScoredSample]) -> Result<(usize, usize)> {
    let (n_human, n_llm) = class_counts(samples);
    if n_llm == 0 {
        return Err(Error::SingleClass("human".into()));
    }
    if n_human == 0 {
        return Err(Error::SingleClass("llm".into()));
    }
    Ok((n_human, n_llm))
}

/// Average ranks (1-based) with ties sharing the mean of their rank run.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank mean of (i+1)..=(j+1)
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve via the rank (Mann–Whitney) statistic:
/// the fraction of (llm, human) pairs where the llm sample outscores the
/// human one, ties counted one half.
pub fn auroc(samples: &[ScoredSample]) -> Result<f64> {
    let (n_human, n_llm) = require_both_classes(samples)?;
    let scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
    let ranks = average_ranks(&scores);
    let pos_rank_sum: f64 = samples
        .iter()
        .zip(&ranks)
        .filter(|(s, _)| s.is_positive())
        .map(|(_, &r)| r)
        .sum();
    let n_pos = n_llm as f64;
    let n_neg = n_human as f64;
    let u = pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg))
}

/// Average precision: mean of precision-at-rank over positives in
/// descending-score order, with tie groups processed atomically.
pub fn auprc(samples: &[ScoredSample]) -> Result<f64> {
    let (_, n_llm) = class_counts(samples);
    if n_llm == 0 {
        return Err(Error::SingleClass("human".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].score.total_cmp(&samples[a].score));

    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut group_tp = 0usize;
        let mut group_fp = 0usize;
        while j < order.len() && samples[order[j]].score == samples[order[i]].score {
            if samples[order[j]].is_positive() {
                group_tp += 1;
            } else {
                group_fp += 1;
            }
            j += 1;
        }
        tp += group_tp;
        fp += group_fp;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += group_tp as f64 * precision;
        i = j;
    }
    Ok(ap / n_llm as f64)
}

/// Operating points (fpr, fnr) scanned over thresholds ascending, starting
/// from the accept-everything point. Classification rule: score > t is llm.
fn error_rate_scan(samples: &[ScoredSample]) -> Result<Vec<(f64, f64, f64)>> {
    let (n_human, n_llm) = require_both_classes(samples)?;
    let mut thresholds: Vec<f64> = samples.iter().map(|s| s.score).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len() + 1);
    points.push((f64::NEG_INFINITY, 1.0, 0.0));
    for &t in &thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for s in samples {
            if s.score > t {
                if s.is_positive() {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let fpr = fp as f64 / n_human as f64;
        let fnr = 1.0 - tp as f64 / n_llm as f64;
        points.push((t, fpr, fnr));
    }
    Ok(points)
}

/// Equal error rate: the value where FPR and FNR cross, linearly
/// interpolated between the adjacent scanned thresholds. Side-selected to
/// [0, 0.5] (a crossing above one half means the score direction is
/// inverted; the equal-error operating point is symmetric).
pub fn eer(samples: &[ScoredSample]) -> Result<f64> {
    let points = error_rate_scan(samples)?;
    let mut prev: Option<(f64, f64)> = None;
    let mut raw = 1.0;
    for &(_, fpr, fnr) in &points {
        let diff = fnr - fpr;
        if diff == 0.0 {
            raw = fpr;
            break;
        }
        if diff > 0.0 {
            if let Some((pf, pn)) = prev {
                let prev_diff = pn - pf;
                // prev_diff < 0 < diff: interpolate the crossing
                let alpha = -prev_diff / (diff - prev_diff);
                raw = pf + alpha * (fpr - pf);
            } else {
                raw = fpr;
            }
            break;
        }
        prev = Some((fpr, fnr));
    }
    Ok(raw.min(1.0 - raw))
}

/// Mean squared error between score and binary label.
pub fn brier(samples: &[ScoredSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sum: f64 = samples
        .iter()
        .map(|s| {
            let y = if s.is_positive() { 1.0 } else { 0.0 };
            (s.score - y).powi(2)
        })
        .sum();
    sum / samples.len() as f64
}

/// Negative mean log-likelihood with scores clipped to [1e-15, 1 - 1e-15].
pub fn log_loss(samples: &[ScoredSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sum: f64 = samples
        .iter()
        .map(|s| {
            let p = s.score.clamp(LOG_CLIP, 1.0 - LOG_CLIP);
            if s.is_positive() {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    sum / samples.len() as f64
}

/// Minimum FPR among thresholds reaching at least the target TPR.
pub fn fpr_at_tpr(samples: &[ScoredSample], target: f64) -> Result<f64> {
    let points = error_rate_scan(samples)?;
    let mut best: Option<f64> = None;
    for &(_, fpr, fnr) in &points {
        let tpr = 1.0 - fnr;
        if tpr >= target {
            best = Some(best.map_or(fpr, |b: f64| b.min(fpr)));
        }
    }
    best.ok_or_else(|| Error::InvalidInput(format!("no threshold reaches TPR {target}")))
}

fn accuracy_at(samples: &[ScoredSample], t: f64) -> f64 {
    let correct = samples
        .iter()
        .filter(|s| (s.score > t) == s.is_positive())
        .count();
    correct as f64 / samples.len() as f64
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Accuracies at the fixed 0.5 threshold, the score median, and the
/// Youden-J-optimal threshold (ties broken toward the larger threshold).
pub fn accuracy_thresholds(samples: &[ScoredSample]) -> Result<(f64, f64, f64, f64)> {
    let (n_human, n_llm) = require_both_classes(samples)?;
    let mut scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
    let med = median(&mut scores);
    // scores is now sorted; reuse it for the threshold scan
    scores.dedup();

    // J compared in exact integer arithmetic so mathematically tied
    // thresholds really tie (and break toward the larger threshold)
    let mut best_j_num = i64::MIN;
    let mut best_t = 0.0;
    for &t in &scores {
        let mut tp = 0i64;
        let mut fp = 0i64;
        for s in samples {
            if s.score > t {
                if s.is_positive() {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let j_num = tp * n_human as i64 - fp * n_llm as i64;
        if j_num >= best_j_num {
            best_j_num = j_num;
            best_t = t;
        }
    }
    Ok((
        accuracy_at(samples, 0.5),
        accuracy_at(samples, med),
        accuracy_at(samples, best_t),
        best_t,
    ))
}

/// Mean llm score minus mean human score.
pub fn separation(samples: &[ScoredSample]) -> Result<f64> {
    require_both_classes(samples)?;
    let mean = |label: Label| {
        let (sum, n) = samples
            .iter()
            .filter(|s| s.label == label)
            .fold((0.0, 0usize), |(sum, n), s| (sum + s.score, n + 1));
        sum / n as f64
    };
    Ok(mean(Label::Llm) - mean(Label::Human))
}

/// Fraction of llm samples scoring strictly above 0.5.
pub fn detection_rate(samples: &[ScoredSample]) -> Result<f64> {
    let llm: Vec<&ScoredSample> = samples.iter().filter(|s| s.is_positive()).collect();
    if llm.is_empty() {
        return Err(Error::SingleClass("human".into()));
    }
    let detected = llm.iter().filter(|s| s.score > 0.5).count();
    Ok(detected as f64 / llm.len() as f64)
}
