//! Class-stratified percentile bootstrap confidence intervals.
//!
//! Each iteration draws its randomness from (seed, iteration index) through
//! a fixed mixing function, so results are deterministic regardless of
//! evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

use super::ScoredSample;

/// Metric selectable by name for bootstrap and CLI use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Auroc,
    Auprc,
    Eer,
    Brier,
    LogLoss,
    FprAt95Tpr,
    Separation,
    DetectionRate,
}

impl MetricName {
    pub fn compute(self, samples: &[ScoredSample]) -> Result<f64> {
        match self {
            MetricName::Auroc => super::auroc(samples),
            MetricName::Auprc => super::auprc(samples),
            MetricName::Eer => super::eer(samples),
            MetricName::Brier => Ok(super::brier(samples)),
            MetricName::LogLoss => Ok(super::log_loss(samples)),
            MetricName::FprAt95Tpr => super::fpr_at_tpr(samples, 0.95),
            MetricName::Separation => super::separation(samples),
            MetricName::DetectionRate => super::detection_rate(samples),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Auroc => "auroc",
            MetricName::Auprc => "auprc",
            MetricName::Eer => "eer",
            MetricName::Brier => "brier",
            MetricName::LogLoss => "log_loss",
            MetricName::FprAt95Tpr => "fpr_at_95tpr",
            MetricName::Separation => "separation",
            MetricName::DetectionRate => "detection_rate",
        }
    }
}

impl std::str::FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auroc" => Ok(MetricName::Auroc),
            "auprc" => Ok(MetricName::Auprc),
            "eer" => Ok(MetricName::Eer),
            "brier" => Ok(MetricName::Brier),
            "log_loss" => Ok(MetricName::LogLoss),
            "fpr_at_95tpr" => Ok(MetricName::FprAt95Tpr),
            "separation" => Ok(MetricName::Separation),
            "detection_rate" => Ok(MetricName::DetectionRate),
            other => Err(Error::InvalidInput(format!("unknown metric {other:?}"))),
        }
    }
}

/// Percentile bootstrap interval around a point estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub metric: MetricName,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
    pub seed: u64,
    pub level: f64,
}

fn mix_seed(seed: u64, iteration: u64) -> u64 {
    // splitmix64 over seed + golden-ratio stride
    let mut z = seed.wrapping_add(iteration.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Linear-interpolation quantile over a sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// 95% percentile bootstrap CI with class-stratified resampling.
///
/// Each class is resampled with replacement to its own size, so no resample
/// can lose a class. If the metric still fails on a resample (degenerate
/// scores), that iteration is redrawn from a fresh substream.
pub fn bootstrap_ci(
    samples: &[ScoredSample],
    metric: MetricName,
    iterations: u32,
    seed: u64,
) -> Result<BootstrapCi> {
    let point = metric.compute(samples)?;
    let human: Vec<&ScoredSample> = samples.iter().filter(|s| s.label == Label::Human).collect();
    let llm: Vec<&ScoredSample> = samples.iter().filter(|s| s.label == Label::Llm).collect();

    let mut stats = Vec::with_capacity(iterations as usize);
    for i in 0..iterations as u64 {
        let mut value = None;
        for retry in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i + retry * iterations as u64));
            let mut resample = Vec::with_capacity(samples.len());
            for class in [&human, &llm] {
                if class.is_empty() {
                    continue;
                }
                for _ in 0..class.len() {
                    let idx = rng.random_range(0..class.len());
                    resample.push((*class[idx]).clone());
                }
            }
            if let Ok(v) = metric.compute(&resample) {
                value = Some(v);
                break;
            }
        }
        let v = value.ok_or_else(|| {
            Error::Numerical(format!(
                "bootstrap iteration {i} failed repeatedly for {}",
                metric.as_str()
            ))
        })?;
        stats.push(v);
    }
    stats.sort_by(f64::total_cmp);
    let lo = quantile_sorted(&stats, 0.025);
    let hi = quantile_sorted(&stats, 0.975);
    Ok(BootstrapCi {
        metric,
        point,
        // the interval always brackets the point estimate
        lo: lo.min(point),
        hi: hi.max(point),
        iterations,
        seed,
        level: 0.95,
    })
}
