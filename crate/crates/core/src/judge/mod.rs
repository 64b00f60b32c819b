//! LLM-as-detector scoring calculus: constrained-decoding scores with
//! polarity handling and task-prior calibration, TF-IDF few-shot
//! retrieval, chain-of-thought and rubric parsing, and the hybrid
//! confidence/logit ensemble.

mod parse;
mod prompt;
mod retrieval;
mod score;

pub use parse::{parse_cot, parse_rubric, Verdict, VerdictParse, VerdictSource};
pub use prompt::{builtin_template, render_prompt, PromptRegime, PromptTemplate};
pub use retrieval::{retrieve_fewshot, TfIdfIndex};
pub use score::{apply_verdict_override, compute_task_prior, constrained_score, hybrid_ensemble};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which word means "AI-generated" in the judge prompt.
///
/// Standard polarity asks "was this AI-generated?" (yes = AI); swapped
/// polarity asks "was this written by a human?" (yes = human), which
/// neutralizes the unconditional "no" bias some chat models exhibit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Standard,
    Swapped,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Polarity::Standard),
            "swapped" => Ok(Polarity::Swapped),
            other => Err(Error::InvalidInput(format!("unknown polarity {other:?}"))),
        }
    }
}

/// Mean yes/no logits over real task prompts; subtracting them removes
/// model-level marginal response bias.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskPrior {
    pub yes_logit_mean: f64,
    pub no_logit_mean: f64,
    pub n_prompts: usize,
}

/// Per-model judging configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeConfig {
    pub polarity: Polarity,
    /// Confidence interval inside which the CoT confidence is ignored.
    pub dead_zone: (f64, f64),
    pub conf_weight: f64,
    pub logit_weight: f64,
    pub k_shots: usize,
    pub max_new_tokens: u32,
    /// Optional interval: ensemble scores falling inside it snap to the
    /// edge matching the parsed verdict. Off by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict_override: Option<(f64, f64)>,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        JudgeConfig {
            polarity: Polarity::Standard,
            dead_zone: (0.40, 0.60),
            conf_weight: 0.6,
            logit_weight: 0.4,
            k_shots: 5,
            max_new_tokens: 400,
            verdict_override: None,
        }
    }
}

impl JudgeConfig {
    pub fn validate(&self) -> Result<()> {
        if (self.conf_weight + self.logit_weight - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "conf_weight {} + logit_weight {} must equal 1",
                self.conf_weight, self.logit_weight
            )));
        }
        let (lo, hi) = self.dead_zone;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidInput(format!(
                "dead zone [{lo}, {hi}] must be an interval within [0,1]"
            )));
        }
        Ok(())
    }
}

/// Shipped defaults per judge model family, keyed by substring of the
/// model id (case-insensitive). Small instruct models use the standard
/// polarity with three shots; the larger chat models need the swapped
/// question and a task prior, with wider dead zones for the Qwen family.
pub fn model_defaults(model_id: &str) -> Option<JudgeConfig> {
    let id = model_id.to_lowercase();
    let cfg = |polarity, dead_zone, k_shots, max_new_tokens| JudgeConfig {
        polarity,
        dead_zone,
        k_shots,
        max_new_tokens,
        ..JudgeConfig::default()
    };
    if id.contains("tinyllama") || id.contains("qwen2.5-1.5b") {
        Some(cfg(Polarity::Standard, (0.40, 0.60), 3, 350))
    } else if id.contains("llama-3.1-8b") {
        Some(cfg(Polarity::Standard, (0.40, 0.60), 5, 350))
    } else if id.contains("qwen2.5-7b") {
        Some(cfg(Polarity::Swapped, (0.35, 0.65), 5, 350))
    } else if id.contains("llama-2-13b") {
        Some(cfg(Polarity::Swapped, (0.40, 0.60), 5, 400))
    } else if id.contains("qwen2.5-14b") {
        Some(cfg(Polarity::Swapped, (0.35, 0.65), 5, 500))
    } else {
        None
    }
}
