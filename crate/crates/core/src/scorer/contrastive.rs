//! Contrastive likelihood: the per-token log-probability gap between a
//! large and a small reference model, plus its variance and hybrid
//! batch-ranked variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::average_ranks;

use super::TokenLogProbs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContrastVariant {
    Base,
    TokenVariance,
    Hybrid,
}

impl std::str::FromStr for ContrastVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(ContrastVariant::Base),
            "token_variance" => Ok(ContrastVariant::TokenVariance),
            "hybrid" => Ok(ContrastVariant::Hybrid),
            other => Err(Error::InvalidInput(format!(
                "unknown contrastive variant {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastiveScore {
    pub sample_id: String,
    pub s: f64,
    pub variant: ContrastVariant,
}

fn per_token_diffs(lp_large: &TokenLogProbs, lp_small: &TokenLogProbs) -> Result<Vec<f64>> {
    if lp_large.sample_id != lp_small.sample_id {
        return Err(Error::InvalidInput(format!(
            "sample ids differ: {:?} vs {:?}",
            lp_large.sample_id, lp_small.sample_id
        )));
    }
    if lp_large.len() != lp_small.len() {
        return Err(Error::InvalidInput(format!(
            "sample {}: token counts differ ({} vs {}); both endpoints must share a tokenizer family",
            lp_large.sample_id,
            lp_large.len(),
            lp_small.len()
        )));
    }
    if lp_large.is_empty() {
        return Err(Error::InvalidInput(format!(
            "sample {}: empty token list",
            lp_large.sample_id
        )));
    }
    Ok(lp_large
        .logprobs
        .iter()
        .zip(&lp_small.logprobs)
        .map(|(l, s)| l - s)
        .collect())
}

fn mean_and_popvar(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Per-sample contrastive score.
///
/// `base` is the mean per-token log-likelihood difference; `token_variance`
/// is the population variance of the per-token differences. The `hybrid`
/// variant is a batch-level statistic — use [`hybrid_contrastive`].
pub fn contrastive_score(
    lp_large: &TokenLogProbs,
    lp_small: &TokenLogProbs,
    variant: ContrastVariant,
) -> Result<ContrastiveScore> {
    let diffs = per_token_diffs(lp_large, lp_small)?;
    let (mean, var) = mean_and_popvar(&diffs);
    let s = match variant {
        ContrastVariant::Base => mean,
        ContrastVariant::TokenVariance => var,
        ContrastVariant::Hybrid => {
            return Err(Error::InvalidInput(
                "hybrid scores are rank-normalized across a batch; use hybrid_contrastive".into(),
            ))
        }
    };
    Ok(ContrastiveScore {
        sample_id: lp_large.sample_id.clone(),
        s,
        variant,
    })
}

/// Hybrid contrastive scores for a whole batch:
/// 0.5 * z(base) + 0.5 * z(-token_variance), where z is rank normalization
/// ((rank - 0.5) / n with average ranks for ties) across the batch.
pub fn hybrid_contrastive(
    pairs: &[(&TokenLogProbs, &TokenLogProbs)],
) -> Result<Vec<ContrastiveScore>> {
    if pairs.len() < 2 {
        return Err(Error::InvalidInput(
            "hybrid contrastive needs at least 2 samples for rank normalization".into(),
        ));
    }
    let mut bases = Vec::with_capacity(pairs.len());
    let mut neg_vars = Vec::with_capacity(pairs.len());
    let mut ids = Vec::with_capacity(pairs.len());
    for (large, small) in pairs {
        let diffs = per_token_diffs(large, small)?;
        let (mean, var) = mean_and_popvar(&diffs);
        bases.push(mean);
        neg_vars.push(-var);
        ids.push(large.sample_id.clone());
    }
    let n = pairs.len() as f64;
    let z_base = average_ranks(&bases);
    let z_nvar = average_ranks(&neg_vars);
    Ok(ids
        .into_iter()
        .enumerate()
        .map(|(i, sample_id)| ContrastiveScore {
            sample_id,
            s: 0.5 * (z_base[i] - 0.5) / n + 0.5 * (z_nvar[i] - 0.5) / n,
            variant: ContrastVariant::Hybrid,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(id: &str, logprobs: Vec<f64>) -> TokenLogProbs {
        let tokens = (0..logprobs.len()).map(|i| format!("t{i}")).collect();
        TokenLogProbs::new(id, tokens, logprobs).unwrap()
    }

    #[test]
    fn identical_lists_give_zero_base() {
        let a = lp("s", vec![-1.0, -2.0]);
        let b = lp("s", vec![-1.0, -2.0]);
        let score = contrastive_score(&a, &b, ContrastVariant::Base).unwrap();
        assert_eq!(score.s, 0.0);
    }

    #[test]
    fn hand_arithmetic_base_and_variance() {
        let large = lp("s", vec![-1.0, -1.0]);
        let small = lp("s", vec![-2.0, -2.0]);
        let base = contrastive_score(&large, &small, ContrastVariant::Base).unwrap();
        assert_eq!(base.s, 1.0);
        let var = contrastive_score(&large, &small, ContrastVariant::TokenVariance).unwrap();
        assert_eq!(var.s, 0.0);

        // diffs [0, 2]: population variance 1
        let large2 = lp("s", vec![-2.0, 0.0]);
        let small2 = lp("s", vec![-2.0, -2.0]);
        let var2 = contrastive_score(&large2, &small2, ContrastVariant::TokenVariance).unwrap();
        assert_eq!(var2.s, 1.0);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = lp("s", vec![-1.0, -2.0]);
        let b = lp("s", vec![-1.0]);
        assert!(contrastive_score(&a, &b, ContrastVariant::Base).is_err());
        let c = lp("other", vec![-1.0, -2.0]);
        assert!(contrastive_score(&a, &c, ContrastVariant::Base).is_err());
        assert!(contrastive_score(&a, &a, ContrastVariant::Hybrid).is_err());
    }

    #[test]
    fn hybrid_ranks_across_batch() {
        // two samples; sample A has higher base and lower variance -> higher hybrid
        let a_large = lp("a", vec![-1.0, -1.0]);
        let a_small = lp("a", vec![-3.0, -3.0]); // base 2, var 0
        let b_large = lp("b", vec![-1.0, -4.0]);
        let b_small = lp("b", vec![-2.0, -2.0]); // diffs [1, -2]: base -0.5, var 2.25
        let scores = hybrid_contrastive(&[(&a_large, &a_small), (&b_large, &b_small)]).unwrap();
        assert_eq!(scores[0].sample_id, "a");
        // a: both rank components at (2-0.5)/2 = 0.75 -> 0.75
        assert!((scores[0].s - 0.75).abs() < 1e-12);
        assert!((scores[1].s - 0.25).abs() < 1e-12);
        assert!(scores.iter().all(|s| (0.0..=1.0).contains(&s.s)));
    }
}
