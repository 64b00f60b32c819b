//! Editable word and phrase lists backing the discourse-marker and
//! AI-phrase features. The built-in defaults are starting points, not
//! claims about any particular corpus; every list can be replaced from a
//! plain-text file (one entry per line, `#` comments allowed).

use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Lexicons {
    pub hedging: Vec<String>,
    pub certainty: Vec<String>,
    pub connectors: Vec<String>,
    /// Full function-word list used for the aggregate ratio and for
    /// filtering content words in the burstiness statistic.
    pub function_words: Vec<String>,
    /// The ten high-frequency tokens profiled individually.
    pub top_function_words: Vec<String>,
    /// Structurally AI-characteristic phrases, matched as substrings.
    pub ai_phrases: Vec<String>,
}

const HEDGING: &[&str] = &[
    "perhaps",
    "maybe",
    "possibly",
    "might",
    "could",
    "seems",
    "appears",
    "likely",
    "arguably",
    "somewhat",
    "presumably",
    "generally",
    "probably",
    "roughly",
    "i think",
    "i believe",
];

const CERTAINTY: &[&str] = &[
    "certainly",
    "definitely",
    "clearly",
    "undoubtedly",
    "obviously",
    "always",
    "never",
    "must",
    "surely",
    "absolutely",
    "indeed",
    "of course",
];

const CONNECTORS: &[&str] = &[
    "however",
    "therefore",
    "moreover",
    "furthermore",
    "additionally",
    "consequently",
    "thus",
    "hence",
    "nevertheless",
    "nonetheless",
    "in addition",
    "as a result",
    "meanwhile",
    "accordingly",
];

const FUNCTION_WORDS: &[&str] = &[
    "the", "of", "and", "a", "an", "to", "in", "is", "it", "that", "for", "on", "with", "as",
    "was", "at", "by", "be", "this", "are", "from", "or", "had", "not", "but", "have", "has", "he",
    "she", "they", "we", "you", "i", "his", "her", "its", "their", "our", "your", "my", "me",
    "him", "them", "us", "were", "been", "being", "do", "does", "did", "will", "would", "can",
    "could", "shall", "should", "may", "might", "there", "here", "when", "where", "which", "who",
    "what", "why", "how", "all", "each", "both", "more", "most", "other", "some", "such", "no",
    "nor", "only", "so", "than", "too", "very", "just", "because", "while", "if", "then", "once",
    "about", "into", "through", "over", "under",
];

const TOP_FUNCTION_WORDS: &[&str] = &[
    "the", "of", "and", "a", "to", "in", "is", "that", "it", "for",
];

const AI_PHRASES: &[&str] = &[
    "it is worth noting",
    "in summary",
    "to summarize",
    "in conclusion",
    "it is important to note",
    "i hope this helps",
    "as an ai",
    "it's important to remember",
    "on the other hand",
    "in other words",
    "this highlights",
    "ultimately",
    "overall",
    "first and foremost",
    "delve into",
    "a testament to",
];

impl Default for Lexicons {
    fn default() -> Self {
        let own = |list: &[&str]| list.iter().map(|s| s.to_string()).collect();
        Lexicons {
            hedging: own(HEDGING),
            certainty: own(CERTAINTY),
            connectors: own(CONNECTORS),
            function_words: own(FUNCTION_WORDS),
            top_function_words: own(TOP_FUNCTION_WORDS),
            ai_phrases: own(AI_PHRASES),
        }
    }
}

/// Load one phrase per line; blank lines and `#` comments are skipped.
/// Entries are lowercased.
pub fn load_phrase_file(path: &Path) -> Result<Vec<String>> {
    let content = std::fs::read_to_string(path)?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect())
}
