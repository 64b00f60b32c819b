//! Corpus preparation: deduplication, length matching, binary flattening,
//! and stratified splitting of paired human/LLM question-answer corpora.
//!
//! File format: JSON Lines, one record per line, UTF-8 with LF endings.
//! Sample record: `{"id", "text", "label", "domain", "source_model"}`;
//! pair record: `{"question_id", "question", "human": <sample>, "llm": <sample>}`.
//! Word counts are derived (whitespace tokens), never stored.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

/// Binary authorship label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Human,
    Llm,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Human => write!(f, "human"),
            Label::Llm => write!(f, "llm"),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Label::Human),
            "llm" => Ok(Label::Llm),
            other => Err(Error::InvalidInput(format!("unknown label {other:?}"))),
        }
    }
}

/// One labeled text with provenance.
///
/// `word_count` is always the number of whitespace-delimited tokens of
/// `text`; it is computed on construction and never deserialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawTextSample")]
pub struct TextSample {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub domain: String,
    pub source_model: String,
    #[serde(skip)]
    word_count: usize,
}

#[derive(Deserialize)]
struct RawTextSample {
    id: String,
    text: String,
    label: Label,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    source_model: String,
}

impl TryFrom<RawTextSample> for TextSample {
    type Error = Error;

    fn try_from(raw: RawTextSample) -> Result<Self> {
        TextSample::new(raw.id, raw.text, raw.label, raw.domain, raw.source_model)
    }
}

impl TextSample {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        label: Label,
        domain: impl Into<String>,
        source_model: impl Into<String>,
    ) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidInput(format!("sample {id:?}: empty text")));
        }
        let word_count = text.split_whitespace().count();
        Ok(TextSample {
            id,
            text,
            label,
            domain: domain.into(),
            source_model: source_model.into(),
            word_count,
        })
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }
}

/// One question paired with its human and LLM answers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawPairRecord")]
pub struct PairRecord {
    pub question_id: String,
    pub question: String,
    pub human: TextSample,
    pub llm: TextSample,
}

#[derive(Deserialize)]
struct RawPairRecord {
    question_id: String,
    question: String,
    human: TextSample,
    llm: TextSample,
}

impl TryFrom<RawPairRecord> for PairRecord {
    type Error = Error;

    fn try_from(raw: RawPairRecord) -> Result<Self> {
        PairRecord::new(raw.question_id, raw.question, raw.human, raw.llm)
    }
}

impl PairRecord {
    pub fn new(
        question_id: impl Into<String>,
        question: impl Into<String>,
        human: TextSample,
        llm: TextSample,
    ) -> Result<Self> {
        let question_id = question_id.into();
        if human.label != Label::Human || llm.label != Label::Llm {
            return Err(Error::InvalidInput(format!(
                "pair {question_id:?}: answers carry wrong labels"
            )));
        }
        if human.domain != llm.domain {
            return Err(Error::InvalidInput(format!(
                "pair {question_id:?}: domain mismatch {:?} vs {:?}",
                human.domain, llm.domain
            )));
        }
        Ok(PairRecord {
            question_id,
            question: question.into(),
            human,
            llm,
        })
    }
}

/// Stratified train/test partition.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<TextSample>,
    pub test: Vec<TextSample>,
    pub seed: u64,
    pub ratio: f64,
}

/// Outcome of [`length_match`]: retained pairs plus drop accounting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LengthMatchReport {
    pub retained: usize,
    pub dropped_out_of_tolerance: usize,
    /// question_ids of pairs rejected because the human answer had zero words.
    pub zero_word_pairs: Vec<String>,
}

/// Remove exact-duplicate questions, keeping the first occurrence.
///
/// The dedup key is the question string with surrounding whitespace trimmed;
/// comparison is exact byte equality after trimming.
pub fn dedup_pairs(pairs: Vec<PairRecord>) -> Vec<PairRecord> {
    let mut seen: HashSet<String> = HashSet::with_capacity(pairs.len());
    pairs
        .into_iter()
        .filter(|pair| seen.insert(pair.question.trim().to_string()))
        .collect()
}

/// Keep only pairs whose LLM answer is within `tolerance` of the human
/// answer's word count: |llm − human| ≤ tolerance × human (inclusive).
///
/// Pairs with a zero-word human answer cannot be matched and are rejected
/// with their ids recorded in the report.
pub fn length_match(
    pairs: Vec<PairRecord>,
    tolerance: f64,
) -> Result<(Vec<PairRecord>, LengthMatchReport)> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be in (0, 1), got {tolerance}"
        )));
    }
    let mut report = LengthMatchReport::default();
    let mut retained = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let human_wc = pair.human.word_count() as f64;
        let llm_wc = pair.llm.word_count() as f64;
        if pair.human.word_count() == 0 {
            report.zero_word_pairs.push(pair.question_id.clone());
            continue;
        }
        if (llm_wc - human_wc).abs() <= tolerance * human_wc {
            retained.push(pair);
        } else {
            report.dropped_out_of_tolerance += 1;
        }
    }
    report.retained = retained.len();
    Ok((retained, report))
}

/// Flatten pairs into independent samples: human then llm, in pair order.
pub fn flatten_binary(pairs: &[PairRecord]) -> Vec<TextSample> {
    let mut samples = Vec::with_capacity(pairs.len() * 2);
    for pair in pairs {
        samples.push(pair.human.clone());
        samples.push(pair.llm.clone());
    }
    samples
}

/// Stratified split preserving exact class balance in both partitions.
///
/// Requires a balanced input. Each class is shuffled independently with a
/// ChaCha8 stream seeded from `seed`, so a fixed seed reproduces the split.
pub fn stratified_split(samples: &[TextSample], ratio: f64, seed: u64) -> Result<DatasetSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidInput(format!(
            "ratio must be in (0, 1), got {ratio}"
        )));
    }
    let mut human: Vec<&TextSample> = Vec::new();
    let mut llm: Vec<&TextSample> = Vec::new();
    for s in samples {
        match s.label {
            Label::Human => human.push(s),
            Label::Llm => llm.push(s),
        }
    }
    if human.len() != llm.len() {
        return Err(Error::Unbalanced {
            human: human.len(),
            llm: llm.len(),
        });
    }
    if human.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }

    let per_class = human.len();
    let train_per_class = ((per_class as f64) * ratio).round() as usize;
    if train_per_class == 0 || train_per_class >= per_class {
        return Err(Error::InvalidInput(format!(
            "ratio {ratio} leaves an empty partition for {per_class} samples per class"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    human.shuffle(&mut rng);
    llm.shuffle(&mut rng);

    let mut train = Vec::with_capacity(train_per_class * 2);
    let mut test = Vec::with_capacity((per_class - train_per_class) * 2);
    for class in [&human, &llm] {
        train.extend(class[..train_per_class].iter().map(|s| (*s).clone()));
        test.extend(class[train_per_class..].iter().map(|s| (*s).clone()));
    }
    Ok(DatasetSplit {
        train,
        test,
        seed,
        ratio,
    })
}

/// Read samples from a JSON Lines file.
pub fn read_samples(path: &Path) -> Result<Vec<TextSample>> {
    io::read_jsonl(path)
}

/// Write samples to a JSON Lines file.
pub fn write_samples(path: &Path, samples: &[TextSample]) -> Result<()> {
    io::write_jsonl(path, samples)
}

/// Read pair records from a JSON Lines file.
pub fn read_pairs(path: &Path) -> Result<Vec<PairRecord>> {
    io::read_jsonl(path)
}

/// Write pair records to a JSON Lines file.
pub fn write_pairs(path: &Path, pairs: &[PairRecord]) -> Result<()> {
    io::write_jsonl(path, pairs)
}
