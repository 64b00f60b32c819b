//! Conversion of raw detector signals to [0,1] detectability scores:
//! rank, log-rank, minmax, and robust sigmoid normalization, with optional
//! inversion (lower raw value means more detectable).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::metrics::average_ranks;

const SIGMOID_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Rank,
    LogRank,
    Minmax,
    Sigmoid,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Rank => "rank",
            NormMethod::LogRank => "log_rank",
            NormMethod::Minmax => "minmax",
            NormMethod::Sigmoid => "sigmoid",
        }
    }
}

impl std::str::FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank" => Ok(NormMethod::Rank),
            "log_rank" => Ok(NormMethod::LogRank),
            "minmax" => Ok(NormMethod::Minmax),
            "sigmoid" => Ok(NormMethod::Sigmoid),
            other => Err(Error::InvalidInput(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

/// One line of a score file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub id: String,
    pub raw: f64,
    pub score: f64,
    pub method: String,
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Normalize raw values into [0,1]; `invert` flips the final score
/// (1 - value) so that, for perplexity, lower raw values score higher.
pub fn normalize_scores(
    raw: &[(String, f64)],
    method: NormMethod,
    invert: bool,
) -> Result<Vec<(String, f64)>> {
    if raw.is_empty() {
        return Err(Error::InvalidInput("no values to normalize".into()));
    }
    if raw.len() < 2
        && matches!(
            method,
            NormMethod::Rank | NormMethod::LogRank | NormMethod::Minmax
        )
    {
        return Err(Error::InvalidInput(format!(
            "{} normalization needs at least 2 values",
            method.as_str()
        )));
    }
    if let Some((id, bad)) = raw.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite raw value {bad} for {id:?}"
        )));
    }
    let values: Vec<f64> = raw.iter().map(|(_, v)| *v).collect();
    let normalized: Vec<f64> = match method {
        NormMethod::Rank => rank_unit(&values),
        NormMethod::LogRank => {
            if let Some((id, bad)) = raw.iter().find(|(_, v)| *v <= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "log_rank requires positive values, got {bad} for {id:?}"
                )));
            }
            let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            rank_unit(&logs)
        }
        NormMethod::Minmax => {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                vec![0.5; values.len()]
            } else {
                values.iter().map(|v| (v - min) / (max - min)).collect()
            }
        }
        NormMethod::Sigmoid => {
            let med = median_of(values.clone());
            let mad = median_of(values.iter().map(|v| (v - med).abs()).collect());
            values
                .iter()
                .map(|v| 1.0 / (1.0 + ((v - med) / (mad + SIGMOID_EPS)).exp()))
                .collect()
        }
    };
    Ok(raw
        .iter()
        .zip(normalized)
        .map(|((id, _), score)| {
            let score = if invert { 1.0 - score } else { score };
            (id.clone(), score.clamp(0.0, 1.0))
        })
        .collect())
}

/// (rank - 0.5) / n with average ranks for ties.
fn rank_unit(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    average_ranks(values)
        .into_iter()
        .map(|r| (r - 0.5) / n)
        .collect()
}

pub fn write_score_file(path: &Path, records: &[ScoreRecord]) -> Result<()> {
    io::write_jsonl(path, records)
}

pub fn read_score_file(path: &Path) -> Result<Vec<ScoreRecord>> {
    io::read_jsonl(path)
}
