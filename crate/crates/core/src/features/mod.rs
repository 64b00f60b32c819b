//! Feature extraction and train-fitted preprocessing.
//!
//! Missing values are explicit NaN markers in the vector and are resolved
//! only by the imputer. Scaler and imputer states are fitted on the
//! training partition only and are immutable afterwards.

mod classical;
mod lexicons;
mod scaling;
mod stylometric;
pub mod text;

pub use classical::{extract_classical, CLASSICAL_FEATURE_NAMES};
pub use lexicons::{load_phrase_file, Lexicons};
pub use scaling::{ImputerState, ScalerState};
pub use stylometric::{
    ai_phrase_density, function_word_profile, function_word_profile_names, punctuation_entropy,
    readability_indices, sentence_ppl_stats, READABILITY_NAMES, SENT_PPL_NAMES,
};

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Named numeric features for one sample. NaN marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub sample_id: String,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(sample_id: impl Into<String>, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::FeatureMismatch(format!(
                "{} names vs {} values",
                names.len(),
                values.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::FeatureMismatch(format!("duplicate feature {n:?}")));
            }
        }
        Ok(FeatureVector {
            sample_id: sample_id.into(),
            names,
            values,
        })
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }
}

/// Externally supplied POS/dependency annotations for one sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawAnnotation")]
pub struct AnnotationRecord {
    pub sample_id: String,
    pub pos_frequencies: [f64; 10],
    pub dep_depth_mean: f64,
    pub dep_depth_max: f64,
}

#[derive(Deserialize)]
struct RawAnnotation {
    sample_id: String,
    pos_frequencies: Vec<f64>,
    dep_depth_mean: f64,
    dep_depth_max: f64,
}

impl TryFrom<RawAnnotation> for AnnotationRecord {
    type Error = Error;

    fn try_from(raw: RawAnnotation) -> Result<Self> {
        let pos: [f64; 10] = raw.pos_frequencies.as_slice().try_into().map_err(|_| {
            Error::InvalidInput(format!(
                "annotation {}: expected 10 pos frequencies, got {}",
                raw.sample_id,
                raw.pos_frequencies.len()
            ))
        })?;
        let sum: f64 = pos.iter().sum();
        if sum > 0.0 && (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "annotation {}: pos frequencies sum to {sum}, expected 1",
                raw.sample_id
            )));
        }
        Ok(AnnotationRecord {
            sample_id: raw.sample_id,
            pos_frequencies: pos,
            dep_depth_mean: raw.dep_depth_mean,
            dep_depth_max: raw.dep_depth_max,
        })
    }
}

/// Reserved names for the 12 annotation-derived features.
pub const ANNOTATION_FEATURE_NAMES: [&str; 12] = [
    "pos_noun",
    "pos_verb",
    "pos_adj",
    "pos_adv",
    "pos_pron",
    "pos_det",
    "pos_adp",
    "pos_conj",
    "pos_num",
    "pos_other",
    "dep_depth_mean",
    "dep_depth_max",
];

/// Append the 12 annotation-derived features under their reserved names.
pub fn merge_annotations(fv: &FeatureVector, ann: &AnnotationRecord) -> Result<FeatureVector> {
    if fv.sample_id != ann.sample_id {
        return Err(Error::InvalidInput(format!(
            "annotation id {:?} does not match vector id {:?}",
            ann.sample_id, fv.sample_id
        )));
    }
    merge_annotation_values(
        fv,
        ann.pos_frequencies
            .iter()
            .copied()
            .chain([ann.dep_depth_mean, ann.dep_depth_max]),
    )
}

/// Append 12 missing-marked annotation features for samples without a record.
pub fn merge_missing_annotations(fv: &FeatureVector) -> Result<FeatureVector> {
    merge_annotation_values(fv, std::iter::repeat_n(f64::NAN, 12))
}

fn merge_annotation_values(
    fv: &FeatureVector,
    values: impl Iterator<Item = f64>,
) -> Result<FeatureVector> {
    for name in ANNOTATION_FEATURE_NAMES {
        if fv.names.iter().any(|n| n == name) {
            return Err(Error::FeatureMismatch(format!(
                "feature {name:?} already present; annotations merged twice?"
            )));
        }
    }
    let mut names = fv.names.clone();
    names.extend(ANNOTATION_FEATURE_NAMES.iter().map(|s| s.to_string()));
    let mut out = fv.values.clone();
    out.extend(values);
    FeatureVector::new(fv.sample_id.clone(), names, out)
}

/// Stateless extractor front-end holding the active lexicons.
#[derive(Debug, Clone, Default)]
pub struct FeatureExtractor {
    pub lexicons: Lexicons,
}

impl FeatureExtractor {
    pub fn new(lexicons: Lexicons) -> Self {
        FeatureExtractor { lexicons }
    }

    /// The 22 classical features.
    pub fn classical(&self, sample_id: &str, text: &str) -> Result<FeatureVector> {
        let values = extract_classical(text, &self.lexicons)?;
        FeatureVector::new(
            sample_id,
            CLASSICAL_FEATURE_NAMES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            values,
        )
    }

    /// Classical plus extended stylometric features (45 values).
    ///
    /// `sentence_ppl` carries per-sentence perplexities scored upstream
    /// (at most the first 15 sentences); `None` leaves those four features
    /// missing-marked. Readability failures on degenerate text also fall
    /// back to missing markers rather than aborting the sample.
    pub fn extended(
        &self,
        sample_id: &str,
        text: &str,
        sentence_ppl: Option<&[f64]>,
    ) -> Result<FeatureVector> {
        let mut fv = self.classical(sample_id, text)?;

        fv.names.push("punctuation_entropy".into());
        fv.values.push(punctuation_entropy(text));

        fv.names.push("ai_phrase_density".into());
        fv.values
            .push(ai_phrase_density(text, &self.lexicons.ai_phrases));

        let readability = readability_indices(text)
            .map(|r| r.to_vec())
            .unwrap_or_else(|_| vec![f64::NAN; 6]);
        fv.names
            .extend(READABILITY_NAMES.iter().map(|s| s.to_string()));
        fv.values.extend(readability);

        fv.names.extend(function_word_profile_names(&self.lexicons));
        fv.values
            .extend(function_word_profile(text, &self.lexicons));

        let ppl_stats = match sentence_ppl {
            Some(ppl) => sentence_ppl_stats(ppl),
            None => [f64::NAN; 4],
        };
        fv.names
            .extend(SENT_PPL_NAMES.iter().map(|s| s.to_string()));
        fv.values.extend(ppl_stats);

        FeatureVector::new(fv.sample_id, fv.names, fv.values)
    }
}

/// Write vectors as CSV: header `sample_id,<names...>`, missing values as
/// empty cells. All vectors must share one name list.
pub fn write_feature_csv(path: &Path, vectors: &[FeatureVector]) -> Result<()> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("no vectors to write".into()))?;
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["sample_id".to_string()];
    header.extend(first.names.clone());
    writer.write_record(&header)?;
    for fv in vectors {
        if fv.names != first.names {
            return Err(Error::FeatureMismatch(format!(
                "vector {} has a different feature set",
                fv.sample_id
            )));
        }
        let mut record = vec![fv.sample_id.clone()];
        for &v in &fv.values {
            record.push(if v.is_nan() {
                String::new()
            } else {
                format!("{v}")
            });
        }
        writer.write_record(&record)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Read a feature CSV produced by [`write_feature_csv`].
pub fn read_feature_csv(path: &Path) -> Result<Vec<FeatureVector>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?.clone();
    if header.is_empty() || &header[0] != "sample_id" {
        return Err(Error::InvalidInput(format!(
            "{}: first column must be sample_id",
            path.display()
        )));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let sample_id = record
            .get(0)
            .ok_or_else(|| Error::InvalidInput("empty csv row".into()))?
            .to_string();
        let mut values = Vec::with_capacity(names.len());
        for field in record.iter().skip(1) {
            if field.is_empty() {
                values.push(f64::NAN);
            } else {
                values.push(field.parse::<f64>().map_err(|e| {
                    Error::InvalidInput(format!("{sample_id}: bad value {field:?}: {e}"))
                })?);
            }
        }
        out.push(FeatureVector::new(sample_id, names.clone(), values)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annotation(id: &str) -> AnnotationRecord {
        AnnotationRecord {
            sample_id: id.to_string(),
            pos_frequencies: [0.3, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
            dep_depth_mean: 3.5,
            dep_depth_max: 7.0,
        }
    }

    #[test]
    fn classical_has_22_named_features() {
        let ex = FeatureExtractor::default();
        let fv = ex.classical("s1", "The cat sat. The cat ran.").unwrap();
        assert_eq!(fv.names.len(), 22);
        assert_eq!(fv.values.len(), 22);
        assert_eq!(fv.names[0], "word_count");
    }

    #[test]
    fn extraction_is_deterministic() {
        let ex = FeatureExtractor::default();
        let text = "Maybe it's fine. However, some say otherwise! Perhaps?";
        let a = ex.extended("s", text, Some(&[12.0, 9.5, 20.0])).unwrap();
        let b = ex.extended("s", text, Some(&[12.0, 9.5, 20.0])).unwrap();
        assert_eq!(a.names, b.names);
        let bits_a: Vec<u64> = a.values.iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = b.values.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn merge_appends_twelve_features() {
        let ex = FeatureExtractor::default();
        let fv = ex.classical("s1", "Some plain text here.").unwrap();
        let merged = merge_annotations(&fv, &annotation("s1")).unwrap();
        assert_eq!(merged.names.len(), 34);
        assert_eq!(merged.value("dep_depth_max"), Some(7.0));

        // duplicate merge is an error
        assert!(merge_annotations(&merged, &annotation("s1")).is_err());
        // id mismatch is an error
        assert!(merge_annotations(&fv, &annotation("other")).is_err());
        // missing annotation marks NaN
        let missing = merge_missing_annotations(&fv).unwrap();
        assert!(missing.value("pos_noun").unwrap().is_nan());
    }

    #[test]
    fn annotation_pos_must_sum_to_one() {
        let json = r#"{"sample_id":"a","pos_frequencies":[0.5,0.5,0,0,0,0,0,0,0,0],"dep_depth_mean":1,"dep_depth_max":2}"#;
        assert!(serde_json::from_str::<AnnotationRecord>(json).is_ok());
        let bad = r#"{"sample_id":"a","pos_frequencies":[0.5,0.4,0,0,0,0,0,0,0,0],"dep_depth_mean":1,"dep_depth_max":2}"#;
        assert!(serde_json::from_str::<AnnotationRecord>(bad).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_missing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let vectors = vec![
            FeatureVector::new("a", vec!["x".into(), "y".into()], vec![1.5, f64::NAN]).unwrap(),
            FeatureVector::new("b", vec!["x".into(), "y".into()], vec![-0.25, 3.0]).unwrap(),
        ];
        write_feature_csv(&path, &vectors).unwrap();
        let back = read_feature_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].values[0], 1.5);
        assert!(back[0].values[1].is_nan());
        assert_eq!(back[1].values, vec![-0.25, 3.0]);
    }

    #[test]
    fn doubling_text_preserves_ratio_features() {
        let ex = FeatureExtractor::default();
        // trailing space so direct self-concatenation doubles every raw count
        let text = "Maybe the cat sat, slowly. It's quite certain now! Really? ";
        let doubled = format!("{text}{text}");
        let one = ex.classical("a", text).unwrap();
        let two = ex.classical("a", &doubled).unwrap();
        let invariant = [
            "avg_word_length",
            "avg_sentence_length",
            "comma_density",
            "period_density",
            "question_ratio",
            "exclamation_ratio",
            "word_entropy",
            "sentence_length_entropy",
            "sentence_length_variance",
            "sentence_length_std",
            "hedging_density",
            "certainty_density",
            "connector_density",
            "contraction_ratio",
        ];
        for name in invariant {
            let a = one.value(name).unwrap();
            let b = two.value(name).unwrap();
            assert!((a - b).abs() < 1e-12, "{name}: {a} vs {b}");
        }
        for name in ["word_count", "char_count", "sentence_count"] {
            assert_eq!(
                two.value(name).unwrap(),
                2.0 * one.value(name).unwrap(),
                "{name}"
            );
        }
    }
}
