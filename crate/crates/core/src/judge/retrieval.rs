//! TF-IDF few-shot retrieval: unigram+bigram vectors with smoothed inverse
//! document frequency, fit on the example pool, queried by cosine
//! similarity with balanced class representation.

use std::collections::HashMap;

use crate::corpus::{Label, TextSample};
use crate::error::{Error, Result};
use crate::features::text::normalized_words;

/// Fitted TF-IDF vocabulary over unigrams and bigrams.
///
/// Vocabulary is capped to the `max_features` terms with the highest
/// document frequency (ties broken lexicographically); idf uses the
/// smoothed form ln((1+N)/(1+df)) + 1 and vectors are L2-normalized.
#[derive(Debug, Clone)]
pub struct TfIdfIndex {
    terms: Vec<String>,
    term_to_idx: HashMap<String, usize>,
    idf: Vec<f64>,
}

fn doc_terms(text: &str) -> Vec<String> {
    let words = normalized_words(text);
    let mut terms = words.clone();
    terms.extend(words.windows(2).map(|w| format!("{} {}", w[0], w[1])));
    terms
}

impl TfIdfIndex {
    pub fn fit(documents: &[&str], max_features: usize) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::InvalidInput("empty document pool".into()));
        }
        let n = documents.len() as f64;
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in documents {
            let mut terms = doc_terms(doc);
            terms.sort_unstable();
            terms.dedup();
            for term in terms {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = df.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(max_features);

        let mut terms = Vec::with_capacity(ranked.len());
        let mut idf = Vec::with_capacity(ranked.len());
        let mut term_to_idx = HashMap::with_capacity(ranked.len());
        for (i, (term, count)) in ranked.into_iter().enumerate() {
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
            term_to_idx.insert(term.clone(), i);
            terms.push(term);
        }
        Ok(TfIdfIndex {
            terms,
            term_to_idx,
            idf,
        })
    }

    /// Sparse L2-normalized tf-idf vector; terms outside the vocabulary
    /// are ignored.
    pub fn transform(&self, text: &str) -> Vec<(usize, f64)> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for term in doc_terms(text) {
            if let Some(&idx) = self.term_to_idx.get(&term) {
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
        let mut vec: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(idx, tf)| (idx, tf * self.idf[idx]))
            .collect();
        vec.sort_by_key(|(idx, _)| *idx);
        let norm = vec.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut vec {
                *w /= norm;
            }
        }
        vec
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.terms
    }
}

/// Cosine similarity of two sparse vectors sorted by index. Both sides are
/// already L2-normalized, so this is a sparse dot product.
pub fn cosine(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut i = 0;
    let mut j = 0;
    let mut dot = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot
}

const MAX_FEATURES: usize = 5000;

/// Retrieve k few-shot examples: the top ceil(k/2) per class by cosine
/// similarity (ties broken by pool order), interleaved human-first and
/// truncated to k.
pub fn retrieve_fewshot(
    query_text: &str,
    pool: &[TextSample],
    k: usize,
) -> Result<Vec<TextSample>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let per_class = k.div_ceil(2);
    let texts: Vec<&str> = pool.iter().map(|s| s.text.as_str()).collect();
    let index = TfIdfIndex::fit(&texts, MAX_FEATURES)?;
    let query = index.transform(query_text);

    let ranked_class = |label: Label| -> Result<Vec<&TextSample>> {
        let mut scored: Vec<(usize, f64, &TextSample)> = pool
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == label)
            .map(|(i, s)| (i, cosine(&query, &index.transform(&s.text)), s))
            .collect();
        if scored.len() < per_class {
            return Err(Error::InvalidInput(format!(
                "pool has {} {label} samples, need {per_class}",
                scored.len()
            )));
        }
        // stable by pool order, then stable sort on similarity desc
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        Ok(scored
            .into_iter()
            .take(per_class)
            .map(|(_, _, s)| s)
            .collect())
    };

    let humans = ranked_class(Label::Human)?;
    let llms = ranked_class(Label::Llm)?;
    let mut out = Vec::with_capacity(k);
    for i in 0..per_class {
        out.push(humans[i].clone());
        if out.len() == k {
            break;
        }
        out.push(llms[i].clone());
        if out.len() == k {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, label: Label, text: &str) -> TextSample {
        TextSample::new(id, text, label, "d", "m").unwrap()
    }

    #[test]
    fn self_similarity_ranks_first() {
        let pool = vec![
            sample("h1", Label::Human, "the cat sat on the mat"),
            sample("h2", Label::Human, "completely different words entirely"),
            sample("l1", Label::Llm, "the cat sat on the mat today"),
            sample("l2", Label::Llm, "unrelated llm answer text"),
        ];
        let out = retrieve_fewshot("the cat sat on the mat", &pool, 2).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].id, "h1"); // identical document first in its class
        assert_eq!(out[1].id, "l1");
    }

    #[test]
    fn balanced_classes_for_even_k() {
        let pool = vec![
            sample("h1", Label::Human, "alpha beta"),
            sample("h2", Label::Human, "gamma delta"),
            sample("l1", Label::Llm, "epsilon zeta"),
            sample("l2", Label::Llm, "eta theta"),
        ];
        let out = retrieve_fewshot("alpha epsilon", &pool, 2).unwrap();
        let humans = out.iter().filter(|s| s.label == Label::Human).count();
        let llms = out.iter().filter(|s| s.label == Label::Llm).count();
        assert_eq!((humans, llms), (1, 1));
    }

    #[test]
    fn odd_k_gives_extra_to_human_class() {
        let pool = vec![
            sample("h1", Label::Human, "alpha beta"),
            sample("h2", Label::Human, "gamma delta"),
            sample("l1", Label::Llm, "epsilon zeta"),
            sample("l2", Label::Llm, "eta theta"),
        ];
        let out = retrieve_fewshot("alpha", &pool, 3).unwrap();
        assert_eq!(out.len(), 3);
        let humans = out.iter().filter(|s| s.label == Label::Human).count();
        assert_eq!(humans, 2);
        // interleaved by class: human, llm, human
        assert_eq!(out[0].label, Label::Human);
        assert_eq!(out[1].label, Label::Llm);
        assert_eq!(out[2].label, Label::Human);
    }

    #[test]
    fn insufficient_pool_is_an_error() {
        let pool = vec![
            sample("h1", Label::Human, "alpha"),
            sample("l1", Label::Llm, "beta"),
        ];
        assert!(retrieve_fewshot("alpha", &pool, 4).is_err());
    }

    #[test]
    fn toy_corpus_matches_hand_tfidf() {
        // Pool: A="the cat", B="the dog", C="cat dog"; N=3.
        // dfs: the=2, cat=2, dog=2, "the cat"=1, "the dog"=1, "cat dog"=1.
        // idf(df=2) = ln(4/3)+1, idf(df=1) = ln(2)+1.
        let idf2 = (4.0f64 / 3.0).ln() + 1.0;
        let idf1 = 2.0f64.ln() + 1.0;

        let index = TfIdfIndex::fit(&["the cat", "the dog", "cat dog"], 5000).unwrap();

        // query "cat dog": weights cat=idf2, dog=idf2, "cat dog"=idf1
        let q_norm = (2.0 * idf2 * idf2 + idf1 * idf1).sqrt();
        // doc A "the cat": weights the=idf2, cat=idf2, "the cat"=idf1
        let a_norm = (2.0 * idf2 * idf2 + idf1 * idf1).sqrt();
        // shared term: cat -> idf2^2
        let expected_qa = (idf2 * idf2) / (q_norm * a_norm);
        // doc C "cat dog" is identical to the query -> cosine 1
        let q = index.transform("cat dog");
        let a = index.transform("the cat");
        let c = index.transform("cat dog");
        assert!((cosine(&q, &a) - expected_qa).abs() < 1e-12);
        assert!((cosine(&q, &c) - 1.0).abs() < 1e-12);
        // ranking: C > A = B for this query
        let b = index.transform("the dog");
        assert!(cosine(&q, &c) > cosine(&q, &a));
        assert!((cosine(&q, &a) - cosine(&q, &b)).abs() < 1e-12);
    }

    #[test]
    fn vocabulary_cap_keeps_highest_df() {
        let index = TfIdfIndex::fit(&["a b", "a c", "a d"], 1).unwrap();
        assert_eq!(index.vocabulary(), &["a".to_string()]);
    }
}
