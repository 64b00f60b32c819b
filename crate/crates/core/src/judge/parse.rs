//! Parsers for generated judge output: the AI_CONFIDENCE / VERDICT tail of
//! chain-of-thought runs and the AI_SCORE rubric format.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ai,
    Human,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictSource {
    ConfidenceLine,
    VerdictLine,
    Fallback,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictParse {
    /// Normalized to [0,1] from the 0-10 scale; absent when unparseable.
    pub confidence: Option<f64>,
    pub verdict: Verdict,
    pub source: VerdictSource,
}

fn confidence_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)^\s*AI_CONFIDENCE\s*:\s*([0-9]+(?:\.[0-9]+)?)").unwrap())
}

fn verdict_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)^\s*VERDICT\s*:\s*(yes|no|ai|human)\b").unwrap())
}

fn map_yes_no(word: &str, polarity: Polarity) -> Verdict {
    let yes = word.eq_ignore_ascii_case("yes");
    match (yes, polarity) {
        (true, Polarity::Standard) | (false, Polarity::Swapped) => Verdict::Ai,
        (false, Polarity::Standard) | (true, Polarity::Swapped) => Verdict::Human,
    }
}

/// Parse a chain-of-thought generation.
///
/// Confidence comes from the last `AI_CONFIDENCE:` line (0-10, divided by
/// 10; values above 10 are rejected). The verdict comes from the last
/// `VERDICT:` line mapped through the active polarity; failing that, the
/// last standalone yes/no token; failing that, unknown.
pub fn parse_cot(generated: &str, polarity: Polarity) -> VerdictParse {
    let confidence = confidence_re()
        .captures_iter(generated)
        .last()
        .and_then(|c| c[1].parse::<f64>().ok())
        .and_then(|v| if v <= 10.0 { Some(v / 10.0) } else { None });

    if let Some(c) = verdict_re().captures_iter(generated).last() {
        let word = &c[1];
        let verdict = match word.to_ascii_lowercase().as_str() {
            "ai" => Verdict::Ai,
            "human" => Verdict::Human,
            yes_no => map_yes_no(yes_no, polarity),
        };
        return VerdictParse {
            confidence,
            verdict,
            source: VerdictSource::VerdictLine,
        };
    }

    // fallback chain: last standalone yes/no token
    let last_yes_no = generated
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| w.eq_ignore_ascii_case("yes") || w.eq_ignore_ascii_case("no"))
        .next_back();
    if let Some(word) = last_yes_no {
        return VerdictParse {
            confidence,
            verdict: map_yes_no(word, polarity),
            source: VerdictSource::Fallback,
        };
    }

    VerdictParse {
        confidence,
        verdict: Verdict::Unknown,
        source: if confidence.is_some() {
            VerdictSource::ConfidenceLine
        } else {
            VerdictSource::Fallback
        },
    }
}

fn ai_score_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)^\s*AI_SCORE\s*:\s*([0-9]+(?:\.[0-9]+)?)").unwrap())
}

fn dimension_indexed_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)\b([1-7])\s*:\s*([0-9]+(?:\.[0-9]+)?)").unwrap())
}

fn dimension_score_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)Score\s*\(0-10\)\s*:\s*([0-9]+(?:\.[0-9]+)?)").unwrap())
}

/// Parse a rubric generation into a [0,1] score.
///
/// Prefers the final `AI_SCORE:` value (0-100, divided by 100). If absent,
/// the seven 0-10 dimension scores are averaged and rescaled. Returns
/// `None` when neither form parses — the sample stays unknown-marked.
pub fn parse_rubric(generated: &str) -> Option<f64> {
    if let Some(c) = ai_score_re().captures_iter(generated).last() {
        if let Ok(v) = c[1].parse::<f64>() {
            if v <= 100.0 {
                return Some(v / 100.0);
            }
        }
    }

    // indexed dimension form: "1:7 2:4 ... 7:9", last value per index wins
    let mut by_index = [None::<f64>; 7];
    for c in dimension_indexed_re().captures_iter(generated) {
        let idx: usize = c[1].parse().unwrap();
        if let Ok(v) = c[2].parse::<f64>() {
            if v <= 10.0 {
                by_index[idx - 1] = Some(v);
            }
        }
    }
    if by_index.iter().all(Option::is_some) {
        let mean = by_index.iter().map(|v| v.unwrap()).sum::<f64>() / 7.0;
        return Some(mean * 10.0 / 100.0);
    }

    // sequential "Score (0-10): n" form: needs exactly seven values
    let scores: Vec<f64> = dimension_score_re()
        .captures_iter(generated)
        .filter_map(|c| c[1].parse::<f64>().ok())
        .filter(|v| *v <= 10.0)
        .collect();
    if scores.len() == 7 {
        let mean = scores.iter().sum::<f64>() / 7.0;
        return Some(mean * 10.0 / 100.0);
    }

    None
}
