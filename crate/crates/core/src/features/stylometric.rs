//! Extended stylometric signals: punctuation entropy, AI-phrase density,
//! readability indices, function-word profiles, and per-sentence perplexity
//! statistics.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::lexicons::Lexicons;
use super::text::{entropy_bits, normalized_words, sentences, syllables};

/// Shannon entropy (bits) over the punctuation character distribution.
/// Zero when at most one distinct punctuation character occurs.
pub fn punctuation_entropy(text: &str) -> f64 {
    let mut counts: HashMap<char, usize> = HashMap::new();
    for c in text.chars().filter(|c| c.is_ascii_punctuation()) {
        *counts.entry(c).or_insert(0) += 1;
    }
    entropy_bits(counts.values().copied())
}

/// Case-insensitive substring matches of the phrase list, normalized by
/// sentence count. A phrase occurring twice in one sentence counts twice.
pub fn ai_phrase_density(text: &str, phrases: &[String]) -> f64 {
    let lowered = text.to_lowercase();
    let n_sentences = sentences(text).len().max(1) as f64;
    let matches: usize = phrases
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| lowered.match_indices(p.as_str()).count())
        .sum();
    matches as f64 / n_sentences
}

/// The six readability indices, in this order.
pub const READABILITY_NAMES: [&str; 6] = [
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "gunning_fog",
    "smog_index",
    "ari",
    "coleman_liau",
];

/// Canonical readability formulas over alphabetic words.
///
/// Returns [Flesch Reading Ease, Flesch-Kincaid Grade, Gunning Fog,
/// SMOG, ARI, Coleman-Liau]. Errors when the text has no alphabetic words.
pub fn readability_indices(text: &str) -> Result<[f64; 6]> {
    let sents = sentences(text);
    if sents.is_empty() {
        return Err(Error::InvalidInput("no sentences".into()));
    }
    let words: Vec<String> = normalized_words(text)
        .into_iter()
        .filter(|w| w.chars().any(|c| c.is_alphabetic()))
        .collect();
    if words.is_empty() {
        return Err(Error::InvalidInput(
            "no alphabetic words for readability".into(),
        ));
    }
    let w = words.len() as f64;
    let s = sents.len() as f64;
    let syl: usize = words.iter().map(|word| syllables(word)).sum();
    let syl = syl as f64;
    let complex = words.iter().filter(|word| syllables(word) >= 3).count() as f64;
    let letters: usize = words
        .iter()
        .map(|word| word.chars().filter(|c| c.is_alphabetic()).count())
        .sum();
    let letters = letters as f64;
    let alnum: usize = words
        .iter()
        .map(|word| word.chars().filter(|c| c.is_alphanumeric()).count())
        .sum();
    let alnum = alnum as f64;

    let flesch = 206.835 - 1.015 * (w / s) - 84.6 * (syl / w);
    let fk_grade = 0.39 * (w / s) + 11.8 * (syl / w) - 15.59;
    let fog = 0.4 * ((w / s) + 100.0 * (complex / w));
    let smog = 1.0430 * (complex * 30.0 / s).sqrt() + 3.1291;
    let ari = 4.71 * (alnum / w) + 0.5 * (w / s) - 21.43;
    let coleman = 0.0588 * (100.0 * letters / w) - 0.296 * (100.0 * s / w) - 15.8;

    Ok([flesch, fk_grade, fog, smog, ari, coleman])
}

/// Feature names for [`function_word_profile`]: `fw_<word>` for each
/// profiled token plus the aggregate ratio.
pub fn function_word_profile_names(lexicons: &Lexicons) -> Vec<String> {
    let mut names: Vec<String> = lexicons
        .top_function_words
        .iter()
        .map(|w| format!("fw_{w}"))
        .collect();
    names.push("function_word_ratio".to_string());
    names
}

/// Per-word relative frequency of the ten profiled tokens plus the
/// aggregate function-word ratio; all values in [0,1].
pub fn function_word_profile(text: &str, lexicons: &Lexicons) -> Vec<f64> {
    let words = normalized_words(text);
    let n = words.len().max(1) as f64;
    let mut out: Vec<f64> = lexicons
        .top_function_words
        .iter()
        .map(|fw| words.iter().filter(|w| *w == fw).count() as f64 / n)
        .collect();
    let aggregate = words
        .iter()
        .filter(|w| lexicons.function_words.iter().any(|f| f == *w))
        .count() as f64
        / n;
    out.push(aggregate);
    out
}

pub const SENT_PPL_NAMES: [&str; 4] = [
    "sent_ppl_mean",
    "sent_ppl_variance",
    "sent_ppl_std",
    "sent_ppl_cv",
];

/// Mean, population variance, standard deviation, and coefficient of
/// variation of per-sentence perplexities. An empty list yields
/// missing-marked (NaN) values for later imputation.
pub fn sentence_ppl_stats(per_sentence_ppl: &[f64]) -> [f64; 4] {
    if per_sentence_ppl.is_empty() {
        return [f64::NAN; 4];
    }
    let n = per_sentence_ppl.len() as f64;
    let mean = per_sentence_ppl.iter().sum::<f64>() / n;
    let variance = per_sentence_ppl
        .iter()
        .map(|p| (p - mean).powi(2))
        .sum::<f64>()
        / n;
    let std = variance.sqrt();
    let cv = if mean == 0.0 { 0.0 } else { std / mean };
    [mean, variance, std, cv]
}
