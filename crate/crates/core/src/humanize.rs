//! Adversarial humanization harness: L0 (original), L1 (light rewrite),
//! L2 (heavy rewrite applied to L1 output), with per-level evaluation
//! against a fixed human pool scored exactly once.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, TextSample};
use crate::error::{EndpointError, Error, Result};
use crate::io;
use crate::judge::{render_prompt, Polarity, PromptRegime, PromptTemplate};
use crate::metrics::{self, ScoredSample};
use crate::scorer::client::{run_batch, GenerationParams, ScorerClient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    L0,
    L1,
    L2,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::L0 => write!(f, "L0"),
            Level::L1 => write!(f, "L1"),
            Level::L2 => write!(f, "L2"),
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L0" | "l0" => Ok(Level::L0),
            "L1" | "l1" => Ok(Level::L1),
            "L2" | "l2" => Ok(Level::L2),
            other => Err(Error::InvalidInput(format!("unknown level {other:?}"))),
        }
    }
}

/// Light and heavy rewrite instructions. Replace these defaults with your
/// own prompt files to reproduce a specific rewriter setup.
#[derive(Debug, Clone)]
pub struct HumanizationTemplates {
    pub light: PromptTemplate,
    pub heavy: PromptTemplate,
}

impl Default for HumanizationTemplates {
    fn default() -> Self {
        let light = PromptTemplate::new(
            "humanize_light",
            "Rewrite the text below so it reads like a person wrote it: vary the \
             sentence lengths, use an informal register, and avoid formulaic \
             structure. Keep the meaning unchanged.\n\nText: [TEXT]\n\nRewritten:",
            PromptRegime::ZeroShot,
        )
        .expect("valid template");
        let heavy = PromptTemplate::new(
            "humanize_heavy",
            "Aggressively rewrite the text below to remove AI-like patterns: no \
             numbered lists, no formal transitions, allow deliberate conversational \
             imperfections and minor grammatical relaxation. Keep the core meaning.\n\n\
             Text: [TEXT]\n\nRewritten:",
            PromptRegime::ZeroShot,
        )
        .expect("valid template");
        HumanizationTemplates { light, heavy }
    }
}

/// One stored rewrite variant; L0 rows carry the original text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantRecord {
    pub id: String,
    pub level: Level,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_level: Option<Level>,
}

/// A failed rewrite, excluded from that level (and deeper levels) with the
/// count reported.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewriteFailure {
    pub id: String,
    pub level: Level,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LevelRun {
    pub variants: Vec<VariantRecord>,
    pub failures: Vec<RewriteFailure>,
}

/// Rewrite one text at L1 or L2. Empty generations are retried once, then
/// the sample is marked failed.
pub fn rewrite(
    client: &dyn ScorerClient,
    text: &str,
    level: Level,
    templates: &HumanizationTemplates,
    params: &GenerationParams,
) -> Result<String> {
    let template = match level {
        Level::L0 => {
            return Err(Error::InvalidInput(
                "L0 is the unmodified original; nothing to rewrite".into(),
            ))
        }
        Level::L1 => &templates.light,
        Level::L2 => &templates.heavy,
    };
    let prompt = render_prompt(template, text, None, Polarity::Standard)?;
    for _ in 0..2 {
        let generated = client.generate(&prompt, params)?;
        if !generated.trim().is_empty() {
            return Ok(generated);
        }
    }
    Err(EndpointError::EmptyGeneration.into())
}

/// Produce the L0/L1/L2 variant corpus for a batch of AI samples.
///
/// L2 consumes each sample's stored L1 output; a failed L1 removes the
/// sample from both deeper levels. Rewrites parallelize across samples up
/// to the client's in-flight bound.
pub fn run_levels(
    client: &dyn ScorerClient,
    samples: &[TextSample],
    templates: &HumanizationTemplates,
    params: &GenerationParams,
) -> LevelRun {
    struct ChainOutcome {
        id: String,
        original: String,
        l1: std::result::Result<String, String>,
        l2: Option<std::result::Result<String, String>>,
    }

    let outcomes: Vec<Result<ChainOutcome>> =
        run_batch(samples, client.max_in_flight(), |sample| {
            let l1 = rewrite(client, &sample.text, Level::L1, templates, params)
                .map_err(|e| e.to_string());
            let l2 = match &l1 {
                Ok(l1_text) => Some(
                    rewrite(client, l1_text, Level::L2, templates, params)
                        .map_err(|e| e.to_string()),
                ),
                Err(_) => None,
            };
            Ok(ChainOutcome {
                id: sample.id.clone(),
                original: sample.text.clone(),
                l1,
                l2,
            })
        });

    let mut run = LevelRun::default();
    for outcome in outcomes {
        let outcome = outcome.expect("chain work is infallible at the batch level");
        run.variants.push(VariantRecord {
            id: outcome.id.clone(),
            level: Level::L0,
            text: outcome.original,
            parent_level: None,
        });
        match outcome.l1 {
            Ok(text) => {
                run.variants.push(VariantRecord {
                    id: outcome.id.clone(),
                    level: Level::L1,
                    text,
                    parent_level: Some(Level::L0),
                });
            }
            Err(reason) => {
                run.failures.push(RewriteFailure {
                    id: outcome.id.clone(),
                    level: Level::L1,
                    reason: reason.clone(),
                });
                run.failures.push(RewriteFailure {
                    id: outcome.id.clone(),
                    level: Level::L2,
                    reason: format!("parent L1 failed: {reason}"),
                });
                continue;
            }
        }
        match outcome.l2.expect("L2 attempted whenever L1 succeeded") {
            Ok(text) => run.variants.push(VariantRecord {
                id: outcome.id,
                level: Level::L2,
                text,
                parent_level: Some(Level::L1),
            }),
            Err(reason) => run.failures.push(RewriteFailure {
                id: outcome.id,
                level: Level::L2,
                reason,
            }),
        }
    }
    run
}

/// Per-level detector metrics against the fixed human pool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: Level,
    pub auroc: f64,
    pub detection_rate: f64,
    pub mean_ai_score: f64,
    pub mean_human_score: f64,
    pub brier: f64,
    pub n_ai: usize,
    pub n_human: usize,
}

/// Evaluate each level's AI scores against the human pool scored once.
/// The pool samples are reused verbatim, so the human side of every level
/// is bit-identical.
pub fn evaluate_levels(
    ai_variants: &[(Level, Vec<ScoredSample>)],
    human_pool: &[ScoredSample],
) -> Result<Vec<LevelReport>> {
    if human_pool.is_empty() {
        return Err(Error::InvalidInput("empty human pool".into()));
    }
    if let Some(bad) = human_pool.iter().find(|s| s.label != Label::Human) {
        return Err(Error::InvalidInput(format!(
            "human pool contains non-human sample {:?}",
            bad.id
        )));
    }
    let mut reports = Vec::with_capacity(ai_variants.len());
    for (level, ai_scores) in ai_variants {
        if ai_scores.is_empty() {
            return Err(Error::InvalidInput(format!(
                "level {level} has no surviving samples"
            )));
        }
        if let Some(bad) = ai_scores.iter().find(|s| s.label != Label::Llm) {
            return Err(Error::InvalidInput(format!(
                "level {level} contains non-llm sample {:?}",
                bad.id
            )));
        }
        let mut union = ai_scores.clone();
        union.extend(human_pool.iter().cloned());
        let mean = |xs: &[ScoredSample]| xs.iter().map(|s| s.score).sum::<f64>() / xs.len() as f64;
        reports.push(LevelReport {
            level: *level,
            auroc: metrics::auroc(&union)?,
            detection_rate: metrics::detection_rate(&union)?,
            mean_ai_score: mean(ai_scores),
            mean_human_score: mean(human_pool),
            brier: metrics::brier(&union),
            n_ai: ai_scores.len(),
            n_human: human_pool.len(),
        });
    }
    Ok(reports)
}

pub fn write_variants(path: &Path, variants: &[VariantRecord]) -> Result<()> {
    io::write_jsonl(path, variants)
}

pub fn read_variants(path: &Path) -> Result<Vec<VariantRecord>> {
    io::read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::client::GenerationParams;
    use std::sync::atomic::{AtomicU64, Ordering};

    struct EchoRewriter {
        calls: AtomicU64,
        fail_substring: Option<String>,
        empty_always: bool,
    }

    impl EchoRewriter {
        fn new() -> Self {
            EchoRewriter {
                calls: AtomicU64::new(0),
                fail_substring: None,
                empty_always: false,
            }
        }
    }

    impl ScorerClient for EchoRewriter {
        fn token_logprobs(&self, _: &str, _: &str) -> Result<crate::scorer::TokenLogProbs> {
            unimplemented!("not used in humanize tests")
        }

        fn yes_no_logits(&self, _: &str) -> Result<(f64, f64)> {
            unimplemented!("not used in humanize tests")
        }

        fn generate(&self, prompt: &str, _: &GenerationParams) -> Result<String> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if self.empty_always {
                return Ok("   ".into());
            }
            if let Some(marker) = &self.fail_substring {
                if prompt.contains(marker.as_str()) {
                    return Err(EndpointError::Transport {
                        attempts: 1,
                        message: "stub outage".into(),
                    }
                    .into());
                }
            }
            // echo the embedded text with a level marker prefix
            Ok(format!("rewritten({prompt})"))
        }
    }

    fn sample(id: &str, text: &str) -> TextSample {
        TextSample::new(id, text, Label::Llm, "d", "m").unwrap()
    }

    #[test]
    fn rewrite_rejects_l0() {
        let client = EchoRewriter::new();
        let err = rewrite(
            &client,
            "text",
            Level::L0,
            &HumanizationTemplates::default(),
            &GenerationParams::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("L0"));
        assert_eq!(client.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn level_pipeline_is_compositional() {
        let client = EchoRewriter::new();
        let samples = vec![sample("a", "original alpha"), sample("b", "original beta")];
        let run = run_levels(
            &client,
            &samples,
            &HumanizationTemplates::default(),
            &GenerationParams::default(),
        );
        assert!(run.failures.is_empty());
        assert_eq!(run.variants.len(), 6);

        for id in ["a", "b"] {
            let by_level = |lvl: Level| {
                run.variants
                    .iter()
                    .find(|v| v.id == id && v.level == lvl)
                    .unwrap()
            };
            let l0 = by_level(Level::L0);
            let l1 = by_level(Level::L1);
            let l2 = by_level(Level::L2);
            assert!(l0.text.starts_with("original"));
            // the L2 prompt embeds the stored L1 output verbatim
            assert!(l1.text.contains(&l0.text));
            assert!(l2.text.contains(&l1.text));
            assert_eq!(l1.parent_level, Some(Level::L0));
            assert_eq!(l2.parent_level, Some(Level::L1));
        }
    }

    #[test]
    fn failed_l1_propagates_to_l2() {
        let client = EchoRewriter {
            fail_substring: Some("poison".into()),
            ..EchoRewriter::new()
        };
        let samples = vec![sample("ok", "fine text"), sample("bad", "poison text")];
        let run = run_levels(
            &client,
            &samples,
            &HumanizationTemplates::default(),
            &GenerationParams::default(),
        );
        // "bad" contributes its L0 but fails L1 and, by propagation, L2
        assert_eq!(run.failures.len(), 2);
        assert!(run.failures.iter().all(|f| f.id == "bad"));
        assert!(run
            .failures
            .iter()
            .any(|f| f.level == Level::L2 && f.reason.contains("parent L1 failed")));
        let bad_variants: Vec<_> = run.variants.iter().filter(|v| v.id == "bad").collect();
        assert_eq!(bad_variants.len(), 1);
        assert_eq!(bad_variants[0].level, Level::L0);
        // surviving sample untouched
        assert_eq!(run.variants.iter().filter(|v| v.id == "ok").count(), 3);
    }

    #[test]
    fn empty_generation_retries_once_then_fails() {
        let client = EchoRewriter {
            empty_always: true,
            ..EchoRewriter::new()
        };
        let err = rewrite(
            &client,
            "text",
            Level::L1,
            &HumanizationTemplates::default(),
            &GenerationParams::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Endpoint(EndpointError::EmptyGeneration)
        ));
        assert_eq!(client.calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn human_pool_scores_identical_across_levels() {
        let human: Vec<ScoredSample> = (0..5)
            .map(|i| {
                ScoredSample::new(format!("h{i}"), Label::Human, 0.1 + 0.05 * i as f64).unwrap()
            })
            .collect();
        let ai = |base: f64| -> Vec<ScoredSample> {
            (0..5)
                .map(|i| {
                    ScoredSample::new(format!("a{i}"), Label::Llm, base + 0.02 * i as f64).unwrap()
                })
                .collect()
        };
        let reports = evaluate_levels(
            &[
                (Level::L0, ai(0.9)),
                (Level::L1, ai(0.85)),
                (Level::L2, ai(0.5)),
            ],
            &human,
        )
        .unwrap();
        assert_eq!(reports.len(), 3);
        let m0 = reports[0].mean_human_score.to_bits();
        assert!(reports.iter().all(|r| r.mean_human_score.to_bits() == m0));
    }

    #[test]
    fn identical_level_scores_give_identical_reports() {
        let human: Vec<ScoredSample> = (0..4)
            .map(|i| ScoredSample::new(format!("h{i}"), Label::Human, 0.2).unwrap())
            .collect();
        let ai: Vec<ScoredSample> = (0..4)
            .map(|i| ScoredSample::new(format!("a{i}"), Label::Llm, 0.8).unwrap())
            .collect();
        let reports = evaluate_levels(
            &[
                (Level::L0, ai.clone()),
                (Level::L1, ai.clone()),
                (Level::L2, ai),
            ],
            &human,
        )
        .unwrap();
        for r in &reports[1..] {
            assert_eq!(r.auroc, reports[0].auroc);
            assert_eq!(r.detection_rate, reports[0].detection_rate);
            assert_eq!(r.brier, reports[0].brier);
        }
    }

    #[test]
    fn empty_level_is_an_error() {
        let human = vec![ScoredSample::new("h", Label::Human, 0.2).unwrap()];
        let err = evaluate_levels(&[(Level::L1, vec![])], &human).unwrap_err();
        assert!(err.to_string().contains("L1"));
    }
}
