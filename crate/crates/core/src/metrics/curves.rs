//! ROC, precision-recall, and calibration curve data for plotting and CSV
//! export.

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::{require_both_classes, ScoredSample};

/// One calibration bin: equal-width over [0,1], empty bins omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub bin_center: f64,
    pub mean_score: f64,
    pub empirical_positive_rate: f64,
    pub count: usize,
}

/// Curve data bundle for one evaluation condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveData {
    /// (fpr, tpr, threshold); rates are achieved classifying score >= threshold.
    pub roc_points: Vec<(f64, f64, f64)>,
    /// (recall, precision) per descending-score tie group.
    pub pr_points: Vec<(f64, f64)>,
    pub calibration_bins: Vec<CalibrationBin>,
}

impl CurveData {
    pub fn compute(samples: &[ScoredSample], bins: usize) -> Result<Self> {
        Ok(CurveData {
            roc_points: roc_curve(samples)?,
            pr_points: pr_curve(samples)?,
            calibration_bins: calibration_curve(samples, bins)?,
        })
    }
}

/// ROC staircase from (0,0) to (1,1), tie groups advanced atomically.
pub fn roc_curve(samples: &[ScoredSample]) -> Result<Vec<(f64, f64, f64)>> {
    let (n_human, n_llm) = require_both_classes(samples)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].score.total_cmp(&samples[a].score));

    let mut points = vec![(0.0, 0.0, f64::INFINITY)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = samples[order[i]].score;
        let mut j = i;
        while j < order.len() && samples[order[j]].score == threshold {
            if samples[order[j]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((
            fp as f64 / n_human as f64,
            tp as f64 / n_llm as f64,
            threshold,
        ));
        i = j;
    }
    Ok(points)
}

/// Precision-recall points per descending-score tie group.
pub fn pr_curve(samples: &[ScoredSample]) -> Result<Vec<(f64, f64)>> {
    let (_, n_llm) = require_both_classes(samples)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].score.total_cmp(&samples[a].score));

    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let score = samples[order[i]].score;
        let mut j = i;
        while j < order.len() && samples[order[j]].score == score {
            if samples[order[j]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let recall = tp as f64 / n_llm as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        points.push((recall, precision));
        i = j;
    }
    Ok(points)
}

/// Equal-width calibration bins on [0,1]; the final bin is closed at 1.0.
pub fn calibration_curve(samples: &[ScoredSample], bins: usize) -> Result<Vec<CalibrationBin>> {
    if bins == 0 {
        return Err(crate::Error::InvalidInput("bins must be >= 1".into()));
    }
    require_both_classes(samples)?;
    let width = 1.0 / bins as f64;
    let mut sums = vec![(0.0f64, 0usize, 0usize); bins]; // (score sum, positives, count)
    for s in samples {
        let mut b = (s.score / width).floor() as usize;
        if b >= bins {
            b = bins - 1; // score == 1.0
        }
        sums[b].0 += s.score;
        if s.is_positive() {
            sums[b].1 += 1;
        }
        sums[b].2 += 1;
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .filter(|(_, (_, _, count))| *count > 0)
        .map(|(b, (score_sum, pos, count))| CalibrationBin {
            bin_center: (b as f64 + 0.5) * width,
            mean_score: score_sum / count as f64,
            empirical_positive_rate: pos as f64 / count as f64,
            count,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label::{Human, Llm};
    use crate::metrics::tests::{auroc_pairwise_oracle, scored};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trapezoid(points: &[(f64, f64, f64)]) -> f64 {
        points
            .windows(2)
            .map(|w| {
                let (x1, y1, _) = w[0];
                let (x2, y2, _) = w[1];
                (x2 - x1) * (y1 + y2) / 2.0
            })
            .sum()
    }

    #[test]
    fn roc_is_monotone_staircase() {
        let s = scored(&[
            (Llm, 0.9),
            (Llm, 0.5),
            (Llm, 0.5),
            (Human, 0.5),
            (Human, 0.2),
        ]);
        let roc = roc_curve(&s).unwrap();
        assert_eq!(roc.first().unwrap().0, 0.0);
        assert_eq!(roc.first().unwrap().1, 0.0);
        assert_eq!(roc.last().unwrap().0, 1.0);
        assert_eq!(roc.last().unwrap().1, 1.0);
        for w in roc.windows(2) {
            assert!(w[1].0 >= w[0].0);
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn trapezoid_over_roc_equals_rank_auroc_with_ties() {
        // randomized instances with heavy ties
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.random_range(4..=64);
            let mut pairs = Vec::with_capacity(n);
            let mut has = (false, false);
            for _ in 0..n {
                let label = if rng.random_bool(0.5) { Llm } else { Human };
                // draw from a small grid so ~30% of scores collide
                let score = (rng.random_range(0..=10) as f64) / 10.0;
                if label == Llm {
                    has.1 = true;
                } else {
                    has.0 = true;
                }
                pairs.push((label, score));
            }
            if !(has.0 && has.1) {
                continue;
            }
            let s = scored(&pairs);
            let rank = crate::metrics::auroc(&s).unwrap();
            let trap = trapezoid(&roc_curve(&s).unwrap());
            let oracle = auroc_pairwise_oracle(&s);
            assert!((rank - trap).abs() < 1e-12, "rank {rank} vs trap {trap}");
            assert!((rank - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_single_bin_when_all_scores_equal() {
        let s = scored(&[(Llm, 1.0), (Llm, 1.0), (Human, 1.0)]);
        let bins = calibration_curve(&s, 10).unwrap();
        assert_eq!(bins.len(), 1);
        assert_eq!(bins[0].mean_score, 1.0);
        assert!((bins[0].empirical_positive_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(bins[0].count, 3);
    }

    #[test]
    fn calibration_empty_bins_omitted() {
        let s = scored(&[(Llm, 0.95), (Human, 0.05)]);
        let bins = calibration_curve(&s, 10).unwrap();
        assert_eq!(bins.len(), 2);
        assert!(bins.iter().all(|b| b.count > 0));
    }

    #[test]
    fn calibrated_synthetic_scores_lie_near_diagonal() {
        // labels drawn Bernoulli(score): empirical rate tracks mean score
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pairs = Vec::new();
        for _ in 0..20_000 {
            let score: f64 = rng.random_range(0.0..=1.0);
            let label = if rng.random_bool(score) { Llm } else { Human };
            pairs.push((label, score));
        }
        let s = scored(&pairs);
        let bins = calibration_curve(&s, 10).unwrap();
        assert_eq!(bins.len(), 10);
        for b in bins {
            // sampling noise bound: ~2000 per bin, 3 sigma of Bernoulli
            let sigma = (0.25 / b.count as f64).sqrt();
            assert!(
                (b.empirical_positive_rate - b.mean_score).abs() < 4.0 * sigma + 1e-3,
                "bin at {} off diagonal: rate {} vs mean {}",
                b.bin_center,
                b.empirical_positive_rate,
                b.mean_score
            );
        }
    }

    #[test]
    fn pr_curve_final_point_recalls_everything() {
        let s = scored(&[(Llm, 0.8), (Llm, 0.6), (Human, 0.7), (Human, 0.1)]);
        let pr = pr_curve(&s).unwrap();
        let last = pr.last().unwrap();
        assert_eq!(last.0, 1.0);
        assert_eq!(last.1, 0.5);
    }
}
