//! Prompt templates and rendering. Templates are UTF-8 text with a [TEXT]
//! placeholder (exactly once); few-shot templates also carry [EXAMPLES].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, TextSample};
use crate::error::{Error, Result};

use super::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptRegime {
    ZeroShot,
    FewShot,
    Cot,
    Rubric,
}

impl std::str::FromStr for PromptRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_shot" => Ok(PromptRegime::ZeroShot),
            "few_shot" => Ok(PromptRegime::FewShot),
            "cot" => Ok(PromptRegime::Cot),
            "rubric" => Ok(PromptRegime::Rubric),
            other => Err(Error::InvalidInput(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub body: String,
    pub regime: PromptRegime,
}

const TEXT_SLOT: &str = "[TEXT]";
const EXAMPLES_SLOT: &str = "[EXAMPLES]";

impl PromptTemplate {
    pub fn new(
        name: impl Into<String>,
        body: impl Into<String>,
        regime: PromptRegime,
    ) -> Result<Self> {
        let body = body.into();
        let count = body.matches(TEXT_SLOT).count();
        if count != 1 {
            return Err(Error::InvalidInput(format!(
                "template must contain {TEXT_SLOT} exactly once, found {count}"
            )));
        }
        Ok(PromptTemplate {
            name: name.into(),
            body,
            regime,
        })
    }

    pub fn load(path: &Path, regime: PromptRegime) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "template".into());
        PromptTemplate::new(name, body, regime)
    }
}

fn example_block(shot: &TextSample, polarity: Polarity) -> String {
    let (question, answer) = match polarity {
        Polarity::Standard => (
            "AI-generated?",
            if shot.label == Label::Llm {
                "yes"
            } else {
                "no"
            },
        ),
        Polarity::Swapped => (
            "Human-written?",
            if shot.label == Label::Human {
                "yes"
            } else {
                "no"
            },
        ),
    };
    format!("Text: \"{}\"\n{} {}\n", shot.text, question, answer)
}

/// Substitute [TEXT] with the target and, when shots are given, [EXAMPLES]
/// with labeled example blocks in retrieved order using the active
/// polarity's label words.
pub fn render_prompt(
    template: &PromptTemplate,
    text: &str,
    shots: Option<&[TextSample]>,
    polarity: Polarity,
) -> Result<String> {
    if template.body.matches(TEXT_SLOT).count() != 1 {
        return Err(Error::InvalidInput(format!(
            "template {:?} lost its {TEXT_SLOT} placeholder",
            template.name
        )));
    }
    let mut rendered = template.body.replacen(TEXT_SLOT, text, 1);
    if let Some(shots) = shots {
        if !template.body.contains(EXAMPLES_SLOT) {
            return Err(Error::InvalidInput(format!(
                "template {:?} has no {EXAMPLES_SLOT} placeholder for few-shot rendering",
                template.name
            )));
        }
        let blocks: Vec<String> = shots.iter().map(|s| example_block(s, polarity)).collect();
        rendered = rendered.replace(EXAMPLES_SLOT, blocks.join("\n").trim_end());
    }
    Ok(rendered)
}

/// Built-in templates for each regime and polarity.
pub fn builtin_template(regime: PromptRegime, polarity: Polarity) -> PromptTemplate {
    let (name, body): (&str, String) = match (regime, polarity) {
        (PromptRegime::ZeroShot, Polarity::Standard) => (
            "zero_shot_standard",
            "System: You detect AI-generated text. Answer with ONE word only: yes or no.\n\
             yes = AI-generated. no = human-written.\n\
             No explanation. No punctuation. One word.\n\n\
             User: Was this text generated by an AI language model?\n\
             Text: \"\"\"[TEXT]\"\"\"\n\
             Answer yes or no.\n\
             Answer:"
                .to_string(),
        ),
        (PromptRegime::ZeroShot, Polarity::Swapped) => (
            "zero_shot_swapped",
            "System: You detect AI-generated text. Answer with ONE word only: yes or no.\n\
             yes = human-written. no = AI-generated.\n\
             No explanation. No punctuation. One word.\n\n\
             User: Was this text written by a human?\n\
             Text: \"\"\"[TEXT]\"\"\"\n\
             Answer yes or no.\n\
             Answer:"
                .to_string(),
        ),
        (PromptRegime::FewShot, polarity) => {
            let question = match polarity {
                Polarity::Standard => "Was this text generated by an AI language model?",
                Polarity::Swapped => "Was this text written by a human?",
            };
            let legend = match polarity {
                Polarity::Standard => "yes = AI-generated. no = human-written.",
                Polarity::Swapped => "yes = human-written. no = AI-generated.",
            };
            (
                "few_shot",
                format!(
                    "System: You detect AI-generated text. Answer with ONE word only: yes or no.\n\
                     {legend}\n\
                     No explanation. No punctuation. One word.\n\n\
                     User:\n\
                     Examples:\n\
                     [EXAMPLES]\n\n\
                     Now answer:\n\
                     {question}\n\
                     Text: \"\"\"[TEXT]\"\"\"\n\
                     Answer yes or no.\n\
                     Answer:"
                ),
            )
        }
        (PromptRegime::Cot, _) => (
            "cot",
            "System: You are an expert forensic linguist. Determine whether a passage was \
             written by a human or generated by an AI. Always complete the analysis and \
             always end with AI_CONFIDENCE and VERDICT.\n\n\
             User: Analyse whether this passage was written by a HUMAN or an AI.\n\
             Passage: \"\"\"[TEXT]\"\"\"\n\n\
             Score each dimension 0 (strongly human) to 10 (strongly AI):\n\
             STRUCTURE:       Neatly organised with clear sections or numbered points?\n\
             COMPLETENESS:    Covers the topic comprehensively without gaps?\n\
             HEDGING:         Confident authoritative tone that lacks uncertainty?\n\
             PERSONAL VOICE:  Personal opinions, anecdotes, slang, contractions, typos?\n\
             LEXICAL RANGE:   Broad, polished vocabulary even in casual answers?\n\
             RESPONSE FIT:    Directly addresses the question or wanders?\n\
             FORMULAIC TELLS: Restates the question, unnaturally tidy closing?\n\n\
             IMPORTANT: Short answers can still be AI-generated.\n\n\
             After scoring, state on the LAST TWO LINES exactly:\n\
             AI_CONFIDENCE: [average of 7 scores, 0-10]\n\
             VERDICT: yes   (if AI-generated)\n\
             VERDICT: no    (if human-written)"
                .to_string(),
        ),
        (PromptRegime::Rubric, _) => (
            "rubric",
            "System: You are an expert forensic linguist specialising in authorship \
             attribution. Score honestly on each dimension. Use the full 0-10 range. \
             Complete every dimension.\n\n\
             User: Score this passage on each dimension from 0 (strongly human) to 10 \
             (strongly AI).\n\
             Passage: [TEXT]\n\n\
             HEDGING/FORMULAIC: formulaic safety language, numbered sections\n\
             COMPLETENESS:      covers every sub-angle even when not asked\n\
             PERSONAL VOICE:    opinions, errors, tangents, emotional register\n\
             LEXICAL UNIFORMITY: vocabulary register stays perfectly consistent\n\
             STRUCTURAL NEATNESS: clear intro/body/conclusion flow\n\
             RESPONSE FIT:      directly addresses the apparent question\n\
             FORMULAIC TELLS:   restates the question, tidy closing\n\n\
             Then write:\n\
             Format: 1:[score] 2:[score] 3:[score] 4:[score] 5:[score] 6:[score] 7:[score]\n\
             AI_SCORE: [arithmetic mean of 7 scores x 10, rounded to nearest integer]"
                .to_string(),
        ),
    };
    PromptTemplate::new(name, body, regime).expect("builtin templates are valid")
}
