//! Perplexity from token log-probabilities with a sliding window for long
//! sequences and an outlier clip for rank stability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::TokenLogProbs;

pub const DEFAULT_WINDOW: usize = 512;
pub const DEFAULT_STRIDE: usize = 256;
pub const DEFAULT_CLIP: f64 = 10_000.0;

/// At most this many leading sentences are scored for the per-sentence
/// perplexity features.
pub const MAX_PPL_SENTENCES: usize = 15;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerplexityResult {
    pub sample_id: String,
    pub ppl: f64,
    pub window_count: usize,
    pub clipped: bool,
}

/// exp(-(1/T) * sum of conditional log-probabilities), clipped at `clip`.
///
/// For T > window the sequence is scanned in windows advanced by `stride`;
/// each token's conditional log-probability is attributed to the first
/// window containing it (the window giving it the most left context — at
/// least `stride` tokens whenever window >= 2*stride), so no token is
/// double-counted, and the final partial window is always included.
pub fn perplexity(
    lp: &TokenLogProbs,
    window: usize,
    stride: usize,
    clip: f64,
) -> Result<PerplexityResult> {
    let t_total = lp.len();
    if t_total == 0 {
        return Err(Error::InvalidInput(format!(
            "sample {}: empty token list",
            lp.sample_id
        )));
    }
    if stride == 0 || stride > window {
        return Err(Error::InvalidInput(format!(
            "stride {stride} must satisfy 0 < stride <= window ({window})"
        )));
    }

    let mut sum = 0.0;
    let mut attributed = 0usize;
    let mut window_count = 0usize;
    let mut start = 0usize;
    loop {
        let end = (start + window).min(t_total);
        window_count += 1;
        for &logprob in &lp.logprobs[attributed..end] {
            sum += logprob;
        }
        attributed = end;
        if end >= t_total {
            break;
        }
        start += stride;
    }
    debug_assert_eq!(attributed, t_total);

    let raw = (-(sum / t_total as f64)).exp();
    let clipped = raw > clip;
    Ok(PerplexityResult {
        sample_id: lp.sample_id.clone(),
        ppl: if clipped { clip } else { raw },
        window_count,
        clipped,
    })
}

/// Clipped perplexity of each of the first [`MAX_PPL_SENTENCES`] sentences,
/// scored through the given endpoint. Sentences the endpoint tokenizes to
/// nothing are skipped.
pub fn sentence_perplexities(
    client: &dyn super::client::ScorerClient,
    sample_id: &str,
    text: &str,
) -> Result<Vec<f64>> {
    let sentences = crate::features::text::sentences(text);
    let mut out = Vec::with_capacity(sentences.len().min(MAX_PPL_SENTENCES));
    for (i, sentence) in sentences.iter().take(MAX_PPL_SENTENCES).enumerate() {
        let lp = client.token_logprobs(&format!("{sample_id}#s{i}"), sentence)?;
        if lp.is_empty() {
            continue;
        }
        out.push(perplexity(&lp, DEFAULT_WINDOW, DEFAULT_STRIDE, DEFAULT_CLIP)?.ppl);
    }
    Ok(out)
}
