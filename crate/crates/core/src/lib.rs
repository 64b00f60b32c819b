//! Detector-evaluation toolkit for machine-generated text: corpus
//! preparation, stylometric features, perplexity / contrastive / LLM-judge
//! scoring, a unified metric suite with bootstrap confidence intervals,
//! Gaussian distribution-shift analysis, and an adversarial humanization
//! harness. All large-model inference is delegated to external scorer
//! endpoints behind a small JSON wire contract.

pub mod classifier;
pub mod corpus;
mod error;
pub mod features;
pub mod humanize;
pub mod io;
pub mod judge;
pub mod metrics;
pub mod scorer;
pub mod shift;
pub mod synthetic;

pub use corpus::{DatasetSplit, Label, PairRecord, TextSample};
pub use error::{EndpointError, Error, Result};
pub use metrics::{MetricReport, ScoredSample};
