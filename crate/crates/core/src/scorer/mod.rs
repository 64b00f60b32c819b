//! External scorer endpoints and the perplexity / contrastive-likelihood /
//! normalization calculus over their token log-probabilities.
//!
//! All model inference happens behind the wire contract implemented in
//! [`client`]; everything in this module's computation paths is pure.

pub mod client;
mod contrastive;
mod normalize;
mod perplexity;
pub mod stub;

pub use client::{HttpScorerClient, RetryPolicy, ScorerClient};
pub use contrastive::{contrastive_score, hybrid_contrastive, ContrastVariant, ContrastiveScore};
pub use normalize::{normalize_scores, read_score_file, write_score_file, NormMethod, ScoreRecord};
pub use perplexity::{
    perplexity, sentence_perplexities, PerplexityResult, DEFAULT_CLIP, DEFAULT_STRIDE,
    DEFAULT_WINDOW, MAX_PPL_SENTENCES,
};

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{EndpointError, Error, Result};

/// Connection settings for one external scorer endpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScorerEndpoint {
    pub base_url: String,
    pub model_id: String,
    /// Bearer token, typically interpolated from an environment variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auth_token: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_secs() -> u64 {
    60
}

fn default_max_in_flight() -> usize {
    4
}

impl ScorerEndpoint {
    pub fn new(base_url: impl Into<String>, model_id: impl Into<String>) -> Self {
        ScorerEndpoint {
            base_url: base_url.into(),
            model_id: model_id.into(),
            auth_token: None,
            timeout_secs: default_timeout_secs(),
            max_in_flight: default_max_in_flight(),
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_in_flight == 0 {
            return Err(Error::InvalidInput("max_in_flight must be >= 1".into()));
        }
        Ok(())
    }
}

/// Aligned per-token natural-log probabilities for one sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenLogProbs {
    pub sample_id: String,
    pub tokens: Vec<String>,
    pub logprobs: Vec<f64>,
}

impl TokenLogProbs {
    pub fn new(
        sample_id: impl Into<String>,
        tokens: Vec<String>,
        logprobs: Vec<f64>,
    ) -> Result<Self> {
        if tokens.len() != logprobs.len() {
            return Err(EndpointError::Malformed(format!(
                "{} tokens vs {} logprobs",
                tokens.len(),
                logprobs.len()
            ))
            .into());
        }
        if let Some(bad) = logprobs.iter().find(|&&lp| !lp.is_finite() || lp > 0.0) {
            return Err(EndpointError::Malformed(format!(
                "logprob {bad} is not a non-positive finite value"
            ))
            .into());
        }
        Ok(TokenLogProbs {
            sample_id: sample_id.into(),
            tokens,
            logprobs,
        })
    }

    /// Token count T.
    pub fn len(&self) -> usize {
        self.logprobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logprobs.is_empty()
    }
}
