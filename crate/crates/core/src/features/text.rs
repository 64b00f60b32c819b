//! Deterministic text primitives: tokenization, sentence segmentation, and
//! syllable counting. No external NLP dependencies; every rule here is part
//! of the extractor's documented contract.

/// Whitespace tokens, exactly as counted by `TextSample::word_count`.
pub fn raw_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Lowercased tokens trimmed of leading/trailing non-alphanumeric characters.
/// Internal punctuation (apostrophes, hyphens) is preserved; tokens empty
/// after trimming are dropped.
pub fn normalized_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|tok| {
            let trimmed = tok.trim_matches(|c: char| !c.is_alphanumeric());
            if trimmed.is_empty() {
                None
            } else {
                Some(trimmed.to_lowercase())
            }
        })
        .collect()
}

/// Split on `.`, `?`, or `!` runs followed by whitespace or end-of-text.
/// A trailing segment without a terminator is its own sentence.
pub fn sentences(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'.' | b'?' | b'!') {
            let mut j = i;
            while j + 1 < bytes.len() && matches!(bytes[j + 1], b'.' | b'?' | b'!') {
                j += 1;
            }
            let at_end = j + 1 >= bytes.len();
            let before_space = !at_end && bytes[j + 1].is_ascii_whitespace();
            if at_end || before_space {
                let sentence = text[start..=j].trim();
                if !sentence.is_empty() {
                    out.push(sentence);
                }
                start = j + 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    if start < text.len() {
        let tail = text[start..].trim();
        if !tail.is_empty() {
            out.push(tail);
        }
    }
    out
}

/// Vowel-group syllable heuristic with silent-e adjustment; minimum 1 for
/// any word containing a letter.
pub fn syllables(word: &str) -> usize {
    let w: Vec<char> = word
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if w.is_empty() {
        return 0;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &w {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = w.len();
    if groups > 1 && w[n - 1] == 'e' && !is_vowel(w[n - 2]) {
        // silent final e, except the consonant-le pattern ("table", "apple")
        let consonant_le = n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
        if !consonant_le {
            groups -= 1;
        }
    }
    groups.max(1)
}

/// Shannon entropy in bits over a discrete count distribution.
/// Counts are sorted before summation so the result is bit-identical
/// regardless of the caller's iteration order.
pub fn entropy_bits(counts: impl Iterator<Item = usize>) -> f64 {
    let mut counts: Vec<usize> = counts.filter(|&c| c > 0).collect();
    counts.sort_unstable();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>()
}
