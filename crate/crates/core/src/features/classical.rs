//! The 22 classical linguistic signals: surface statistics, lexical
//! diversity, punctuation, repetition, entropy, syntactic complexity, and
//! discourse markers.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::lexicons::Lexicons;
use super::text::{entropy_bits, normalized_words, raw_tokens, sentences};

pub const CLASSICAL_FEATURE_NAMES: [&str; 22] = [
    "word_count",
    "char_count",
    "sentence_count",
    "avg_word_length",
    "avg_sentence_length",
    "type_token_ratio",
    "hapax_ratio",
    "comma_density",
    "period_density",
    "question_ratio",
    "exclamation_ratio",
    "bigram_repetition",
    "trigram_repetition",
    "word_entropy",
    "sentence_length_entropy",
    "sentence_length_variance",
    "sentence_length_std",
    "hedging_density",
    "certainty_density",
    "connector_density",
    "contraction_ratio",
    "burstiness",
];

/// Count occurrences of lexicon phrases over the normalized word sequence.
/// Multi-word phrases match consecutive words; matches do not overlap
/// within one phrase.
fn phrase_matches(words: &[String], lexicon: &[String]) -> usize {
    let mut total = 0;
    for phrase in lexicon {
        let parts: Vec<&str> = phrase.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        let mut i = 0;
        while i + parts.len() <= words.len() {
            if words[i..i + parts.len()]
                .iter()
                .zip(&parts)
                .all(|(w, p)| w == p)
            {
                total += 1;
                i += parts.len();
            } else {
                i += 1;
            }
        }
    }
    total
}

fn ngram_repetition(words: &[String], n: usize) -> f64 {
    if words.len() < n {
        return 0.0;
    }
    let total = words.len() - n + 1;
    let mut seen: HashMap<&[String], usize> = HashMap::new();
    for window in words.windows(n) {
        *seen.entry(window).or_insert(0) += 1;
    }
    1.0 - seen.len() as f64 / total as f64
}

/// Dispersion of inter-occurrence gaps of content words:
/// (sigma - mu) / (sigma + mu) over pooled gaps, 0 when undefined.
/// A BTreeMap keeps gap pooling order (and thus float summation)
/// deterministic.
fn burstiness(words: &[String], function_words: &[String]) -> f64 {
    let mut positions: std::collections::BTreeMap<&str, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        if !function_words.iter().any(|f| f == w) {
            positions.entry(w.as_str()).or_default().push(i);
        }
    }
    let mut gaps: Vec<f64> = Vec::new();
    for pos in positions.values() {
        for w in pos.windows(2) {
            gaps.push((w[1] - w[0]) as f64);
        }
    }
    if gaps.is_empty() {
        return 0.0;
    }
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std + mean == 0.0 {
        0.0
    } else {
        (std - mean) / (std + mean)
    }
}

fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Extract the 22 classical features in the order of
/// [`CLASSICAL_FEATURE_NAMES`].
pub fn extract_classical(text: &str, lexicons: &Lexicons) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(Error::InvalidInput("empty text".into()));
    }
    let tokens = raw_tokens(text);
    let words = normalized_words(text);
    let sents = sentences(text);

    let word_count = tokens.len() as f64;
    let char_count = text.chars().count() as f64;
    let sentence_count = sents.len().max(1) as f64;

    let avg_word_length = if words.is_empty() {
        0.0
    } else {
        words.iter().map(|w| w.chars().count()).sum::<usize>() as f64 / words.len() as f64
    };
    let avg_sentence_length = word_count / sentence_count;

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for w in &words {
        *counts.entry(w.as_str()).or_insert(0) += 1;
    }
    let n_words = words.len().max(1) as f64;
    let type_token_ratio = counts.len() as f64 / n_words;
    let hapax = counts.values().filter(|&&c| c == 1).count();
    let hapax_ratio = hapax as f64 / n_words;

    let comma_density = text.chars().filter(|&c| c == ',').count() as f64 / char_count;
    let period_density = text.chars().filter(|&c| c == '.').count() as f64 / char_count;
    let question_ratio = sents.iter().filter(|s| s.ends_with('?')).count() as f64 / sentence_count;
    let exclamation_ratio =
        sents.iter().filter(|s| s.ends_with('!')).count() as f64 / sentence_count;

    let word_entropy = entropy_bits(counts.values().copied());

    let sent_lengths: Vec<f64> = sents
        .iter()
        .map(|s| s.split_whitespace().count() as f64)
        .collect();
    let mut length_counts: HashMap<u64, usize> = HashMap::new();
    for &l in &sent_lengths {
        *length_counts.entry(l as u64).or_insert(0) += 1;
    }
    let sentence_length_entropy = entropy_bits(length_counts.values().copied());
    let sentence_length_variance = population_variance(&sent_lengths);
    let sentence_length_std = sentence_length_variance.sqrt();

    let density = |lexicon: &[String]| (phrase_matches(&words, lexicon) as f64 / n_words).min(1.0);
    let hedging_density = density(&lexicons.hedging);
    let certainty_density = density(&lexicons.certainty);
    let connector_density = density(&lexicons.connectors);

    let contractions = tokens
        .iter()
        .filter(|t| {
            let chars: Vec<char> = t.chars().collect();
            chars.windows(3).any(|w| {
                (w[1] == '\'' || w[1] == '\u{2019}') && w[0].is_alphabetic() && w[2].is_alphabetic()
            })
        })
        .count();
    let contraction_ratio = contractions as f64 / word_count.max(1.0);

    Ok(vec![
        word_count,
        char_count,
        sentence_count,
        avg_word_length,
        avg_sentence_length,
        type_token_ratio,
        hapax_ratio,
        comma_density,
        period_density,
        question_ratio,
        exclamation_ratio,
        ngram_repetition(&words, 2),
        ngram_repetition(&words, 3),
        word_entropy,
        sentence_length_entropy,
        sentence_length_variance,
        sentence_length_std,
        hedging_density,
        certainty_density,
        connector_density,
        contraction_ratio,
        burstiness(&words, &lexicons.function_words),
    ])
}
