//! Constrained-decoding score, task-prior calibration, and the hybrid
//! confidence/logit ensemble.

use crate::error::{Error, Result};

use super::{JudgeConfig, Polarity, TaskPrior, Verdict};

/// Softmax over the (prior-adjusted) yes/no logits, oriented so the result
/// is always P(llm) regardless of polarity.
pub fn constrained_score(
    yes_logit: f64,
    no_logit: f64,
    polarity: Polarity,
    prior: Option<&TaskPrior>,
) -> Result<f64> {
    if !yes_logit.is_finite() || !no_logit.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite logits ({yes_logit}, {no_logit})"
        )));
    }
    let (yes, no) = match prior {
        Some(p) => (yes_logit - p.yes_logit_mean, no_logit - p.no_logit_mean),
        None => (yes_logit, no_logit),
    };
    let p_yes = 1.0 / (1.0 + (no - yes).exp());
    Ok(match polarity {
        Polarity::Standard => p_yes,
        Polarity::Swapped => 1.0 - p_yes,
    })
}

/// Arithmetic mean of yes/no logits over real task prompts.
pub fn compute_task_prior(logit_pairs: &[(f64, f64)]) -> Result<TaskPrior> {
    if logit_pairs.is_empty() {
        return Err(Error::InvalidInput("no logit pairs for task prior".into()));
    }
    let n = logit_pairs.len() as f64;
    Ok(TaskPrior {
        yes_logit_mean: logit_pairs.iter().map(|(y, _)| y).sum::<f64>() / n,
        no_logit_mean: logit_pairs.iter().map(|(_, no)| no).sum::<f64>() / n,
        n_prompts: logit_pairs.len(),
    })
}

/// Weighted blend of parsed confidence and logit score. A missing
/// confidence, or one inside the dead zone (closed interval), falls back
/// to the logit score alone.
pub fn hybrid_ensemble(conf: Option<f64>, logit_score: f64, cfg: &JudgeConfig) -> Result<f64> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&logit_score) {
        return Err(Error::InvalidInput(format!(
            "logit_score {logit_score} outside [0,1]"
        )));
    }
    let (lo, hi) = cfg.dead_zone;
    let score = match conf {
        Some(c) if !(lo..=hi).contains(&c) => cfg.conf_weight * c + cfg.logit_weight * logit_score,
        _ => logit_score,
    };
    Ok(score.clamp(0.0, 1.0))
}

/// Optional last step: an ensemble score inside the override interval
/// snaps to the interval edge matching the parsed verdict (off unless the
/// config carries an interval; unknown verdicts never override).
pub fn apply_verdict_override(score: f64, verdict: Verdict, cfg: &JudgeConfig) -> f64 {
    let Some((lo, hi)) = cfg.verdict_override else {
        return score;
    };
    if !(lo..=hi).contains(&score) {
        return score;
    }
    match verdict {
        Verdict::Ai => hi,
        Verdict::Human => lo,
        Verdict::Unknown => score,
    }
}
