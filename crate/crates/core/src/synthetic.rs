//! Seeded synthetic corpus generator for benchmarks and end-to-end runs
//! without real data: "human" texts with high sentence-length variance,
//! contractions, and varied punctuation; "llm" texts that are templated
//! and uniform with stock AI phrasing.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, PairRecord, TextSample};

const CORE_WORDS: &[&str] = &[
    "time",
    "people",
    "way",
    "day",
    "thing",
    "world",
    "life",
    "hand",
    "part",
    "place",
    "work",
    "week",
    "case",
    "point",
    "company",
    "number",
    "group",
    "problem",
    "fact",
    "water",
    "money",
    "story",
    "month",
    "book",
    "issue",
    "side",
    "kind",
    "house",
    "friend",
    "power",
    "hour",
    "game",
    "line",
    "end",
    "member",
    "city",
    "name",
    "team",
    "minute",
    "idea",
    "body",
    "back",
    "parent",
    "answer",
    "question",
    "school",
    "state",
    "family",
    "student",
    "country",
    "area",
    "system",
    "program",
    "night",
    "level",
    "office",
    "door",
    "health",
    "person",
    "art",
    "history",
    "result",
    "change",
    "morning",
    "reason",
    "research",
    "moment",
    "air",
    "teacher",
    "force",
    "education",
];

const HUMAN_FLAVOR: &[&str] = &[
    "honestly",
    "weird",
    "stuff",
    "kinda",
    "yeah",
    "guess",
    "crazy",
    "funny",
    "basically",
    "literally",
    "anyway",
    "maybe",
    "probably",
    "huge",
    "tiny",
    "messy",
    "awesome",
    "boring",
    "lucky",
    "dumb",
];

const CONTRACTIONS: &[&str] = &[
    "don't", "it's", "can't", "i'm", "won't", "didn't", "that's", "you're", "isn't", "wasn't",
];

const LLM_FLAVOR: &[&str] = &[
    "significant",
    "comprehensive",
    "various",
    "essential",
    "numerous",
    "particular",
    "specific",
    "important",
    "relevant",
    "notable",
    "fundamental",
    "considerable",
    "appropriate",
    "effective",
    "potential",
];

const LLM_OPENERS: &[&str] = &[
    "It is worth noting that",
    "In summary,",
    "Furthermore,",
    "Additionally,",
    "In conclusion,",
    "Moreover,",
    "It is important to note that",
];

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn human_sentence(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..=25);
    let mut words = Vec::with_capacity(len);
    for i in 0..len {
        let roll: f64 = rng.random_range(0.0..1.0);
        let word = if roll < 0.12 {
            *CONTRACTIONS.choose(rng).unwrap()
        } else if roll < 0.35 {
            *HUMAN_FLAVOR.choose(rng).unwrap()
        } else {
            *CORE_WORDS.choose(rng).unwrap()
        };
        let mut word = word.to_string();
        if i == 0 && rng.random_bool(0.7) {
            word = capitalize(&word);
        }
        if i + 1 < len && rng.random_bool(0.08) {
            word.push(',');
        }
        words.push(word);
    }
    let terminal = match rng.random_range(0..10) {
        0..=5 => ".",
        6 | 7 => "!",
        8 => "?",
        _ => "...",
    };
    format!("{}{}", words.join(" "), terminal)
}

fn llm_sentence(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(13..=14);
    let mut words: Vec<String> = Vec::with_capacity(len + 4);
    if rng.random_bool(0.45) {
        words.push(LLM_OPENERS.choose(rng).unwrap().to_string());
    }
    for i in 0..len {
        let roll: f64 = rng.random_range(0.0..1.0);
        let word = if roll < 0.30 {
            *LLM_FLAVOR.choose(rng).unwrap()
        } else {
            *CORE_WORDS.choose(rng).unwrap()
        };
        let mut word = word.to_string();
        if words.is_empty() && i == 0 {
            word = capitalize(&word);
        }
        words.push(word);
    }
    format!("{}.", words.join(" "))
}

fn human_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(3..=8);
    (0..n)
        .map(|_| human_sentence(rng))
        .collect::<Vec<_>>()
        .join(" ")
}

fn llm_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(5..=6);
    (0..n)
        .map(|_| llm_sentence(rng))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generate a balanced labeled corpus: n_per_class human + n_per_class llm
/// samples, deterministic under the seed.
pub fn generate_samples(n_per_class: usize, seed: u64) -> Vec<TextSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_per_class * 2);
    for i in 0..n_per_class {
        samples.push(
            TextSample::new(
                format!("human-{i:05}"),
                human_text(&mut rng),
                Label::Human,
                "synthetic",
                "human",
            )
            .expect("generator never emits empty text"),
        );
        samples.push(
            TextSample::new(
                format!("llm-{i:05}"),
                llm_text(&mut rng),
                Label::Llm,
                "synthetic",
                "stub-llm",
            )
            .expect("generator never emits empty text"),
        );
    }
    samples
}

/// Generate paired question/answer records for the preparation pipeline.
/// Some pairs deliberately violate the 20% length-matching tolerance and
/// a few questions repeat, so dedup and length matching have work to do.
pub fn generate_pairs(n: usize, seed: u64) -> Vec<PairRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_5EED);
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        // every 7th question duplicates the previous one
        let qid = format!("q{i:04}");
        let question = if i % 7 == 6 {
            format!("synthetic question number {}?", i - 1)
        } else {
            format!("synthetic question number {i}?")
        };
        let human = TextSample::new(
            format!("{qid}-h"),
            human_text(&mut rng),
            Label::Human,
            "synthetic",
            "human",
        )
        .unwrap();
        let llm_body = if i % 5 == 4 {
            // deliberately too long for the tolerance check
            format!("{} {}", llm_text(&mut rng), llm_text(&mut rng))
        } else {
            // aim near the human word count
            let target = human.word_count();
            let mut text = llm_text(&mut rng);
            let mut words: Vec<&str> = text.split_whitespace().collect();
            while words.len() > target.max(4) {
                words.pop();
            }
            text = words.join(" ");
            if !text.ends_with('.') {
                text.push('.');
            }
            text
        };
        let llm = TextSample::new(
            format!("{qid}-l"),
            llm_body,
            Label::Llm,
            "synthetic",
            "stub-llm",
        )
        .unwrap();
        pairs.push(PairRecord::new(qid, question, human, llm).unwrap());
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seed_deterministic() {
        let a = generate_samples(10, 42);
        let b = generate_samples(10, 42);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.text, y.text);
        }
        let c = generate_samples(10, 43);
        assert!(a.iter().zip(&c).any(|(x, y)| x.text != y.text));
    }

    #[test]
    fn classes_are_balanced_and_labeled() {
        let samples = generate_samples(25, 7);
        assert_eq!(samples.len(), 50);
        let humans = samples.iter().filter(|s| s.label == Label::Human).count();
        assert_eq!(humans, 25);
    }

    #[test]
    fn class_styles_differ() {
        let samples = generate_samples(50, 3);
        let human_text: String = samples
            .iter()
            .filter(|s| s.label == Label::Human)
            .map(|s| s.text.clone())
            .collect::<Vec<_>>()
            .join(" ");
        let llm_text: String = samples
            .iter()
            .filter(|s| s.label == Label::Llm)
            .map(|s| s.text.clone())
            .collect::<Vec<_>>()
            .join(" ");
        assert!(human_text.contains('\''), "human texts carry contractions");
        assert!(!llm_text.contains('\''), "llm texts avoid contractions");
        assert!(llm_text.contains("In summary"));
        assert!(human_text.contains('!'));
    }

    #[test]
    fn pairs_have_duplicates_and_length_outliers() {
        let pairs = generate_pairs(20, 9);
        assert_eq!(pairs.len(), 20);
        let mut questions: Vec<&str> = pairs.iter().map(|p| p.question.as_str()).collect();
        questions.sort_unstable();
        let total = questions.len();
        questions.dedup();
        assert!(questions.len() < total, "some questions repeat");

        let out_of_tolerance = pairs
            .iter()
            .filter(|p| {
                let h = p.human.word_count() as f64;
                let l = p.llm.word_count() as f64;
                (l - h).abs() > 0.2 * h
            })
            .count();
        assert!(out_of_tolerance > 0);
        assert!(out_of_tolerance < pairs.len());
    }
}
