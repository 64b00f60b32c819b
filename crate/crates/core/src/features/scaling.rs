//! Train-fitted standardization and median imputation. Both states are
//! immutable after fit and must be fitted on the training partition only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::FeatureVector;

/// Per-feature standardization state: (x - mean) / std with population
/// statistics; zero-variance columns keep std 1 so they pass through as 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalerState {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Per-feature training medians used to resolve missing values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImputerState {
    pub names: Vec<String>,
    pub medians: Vec<f64>,
}

fn check_uniform_names(vectors: &[FeatureVector]) -> Result<&[String]> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("no training vectors".into()))?;
    for fv in vectors {
        if fv.names != first.names {
            return Err(Error::FeatureMismatch(format!(
                "vector {} disagrees with the training feature set",
                fv.sample_id
            )));
        }
    }
    Ok(&first.names)
}

fn check_names(state_names: &[String], fv: &FeatureVector) -> Result<()> {
    if state_names != fv.names.as_slice() {
        return Err(Error::FeatureMismatch(format!(
            "vector {} does not match the fitted feature set",
            fv.sample_id
        )));
    }
    Ok(())
}

impl ScalerState {
    /// Fit means and population stds per column, ignoring missing values.
    pub fn fit(train: &[FeatureVector]) -> Result<Self> {
        if train.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "scaler needs at least 2 training vectors, got {}",
                train.len()
            )));
        }
        let names = check_uniform_names(train)?.to_vec();
        let dim = names.len();
        let mut means = vec![0.0; dim];
        let mut stds = vec![1.0; dim];
        for j in 0..dim {
            let column: Vec<f64> = train
                .iter()
                .map(|fv| fv.values[j])
                .filter(|v| !v.is_nan())
                .collect();
            if column.is_empty() {
                continue; // all-missing column: identity transform
            }
            let n = column.len() as f64;
            let mean = column.iter().sum::<f64>() / n;
            let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            means[j] = mean;
            stds[j] = if var.sqrt() == 0.0 { 1.0 } else { var.sqrt() };
        }
        Ok(ScalerState { names, means, stds })
    }

    /// Standardize one vector; missing values pass through untouched.
    pub fn apply(&self, fv: &FeatureVector) -> Result<FeatureVector> {
        check_names(&self.names, fv)?;
        let values = fv
            .values
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&m, &s))| if v.is_nan() { v } else { (v - m) / s })
            .collect();
        FeatureVector::new(fv.sample_id.clone(), fv.names.clone(), values)
    }
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

impl ImputerState {
    /// Fit per-column training medians; every column needs at least one
    /// non-missing value.
    pub fn fit(train: &[FeatureVector]) -> Result<Self> {
        let names = check_uniform_names(train)?.to_vec();
        let mut medians = Vec::with_capacity(names.len());
        for (j, name) in names.iter().enumerate() {
            let column: Vec<f64> = train
                .iter()
                .map(|fv| fv.values[j])
                .filter(|v| !v.is_nan())
                .collect();
            if column.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "column {name:?} has no non-missing training values"
                )));
            }
            medians.push(median_of(column));
        }
        Ok(ImputerState { names, medians })
    }

    /// Replace missing values with the fitted medians.
    pub fn apply(&self, fv: &FeatureVector) -> Result<FeatureVector> {
        check_names(&self.names, fv)?;
        let values = fv
            .values
            .iter()
            .zip(&self.medians)
            .map(|(&v, &m)| if v.is_nan() { m } else { v })
            .collect();
        FeatureVector::new(fv.sample_id.clone(), fv.names.clone(), values)
    }
}
