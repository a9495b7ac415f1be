//! Document ingestion, normalization, phrase segmentation and the annotation
//! taxonomy.

mod dedupe;
mod io;
mod phrase;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dedupe::{dedupe, normalize_for_dedupe, Deduplicator};
pub use io::{
    parse_gold_annotations, parse_word_list, read_documents, read_word_list, validate_annotations, DocumentReader,
    MANIFEST_RECORD,
};
pub use phrase::segment_phrases;
pub use text::{
    extract_hashtags, keyword_filter, preprocess, strip_urls, surface_tokens, tokenize, KeywordFilter, Preprocessor,
    DEFAULT_STOPWORDS,
};

/// One tweet-like record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// Seconds since the Unix epoch, UTC. Accepts ISO-8601 strings or integers on input.
    #[serde(with = "io::timestamp")]
    pub created_at: i64,
    #[serde(default)]
    pub retweet_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country_code: Option<String>,
    #[serde(default)]
    pub is_retweet: bool,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, created_at: i64) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            created_at,
            retweet_count: 0,
            lang: None,
            country_code: None,
            is_retweet: false,
        }
    }
}

/// Output of [`preprocess`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
    /// Lowercased hashtags without the leading '#'.
    pub hashtags: Vec<String>,
}

/// A keyword-bearing sentence fragment or hashtag within a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub doc_id: String,
    pub index: usize,
    pub text: String,
    pub trigger_terms: Vec<String>,
}

/// Attitude toward stay-at-home directives. Declaration order is the
/// serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stance {
    For,
    Against,
    Undecided,
}

impl Stance {
    pub const ALL: [Stance; 3] = [Stance::For, Stance::Against, Stance::Undecided];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Stance> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Stance::For => "For",
            Stance::Against => "Against",
            Stance::Undecided => "Undecided",
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "for" | "pro" | "positive" | "support" | "+" => Ok(Stance::For),
            "against" | "negative" | "anti" | "-" => Ok(Stance::Against),
            "undecided" | "neutral" | "?" => Ok(Stance::Undecided),
            other => Err(format!("unknown stance {other:?}")),
        }
    }
}

/// The twelve moral frames: five Moral Foundations virtue/vice pairs plus
/// Freedom/Oppression. The integer encoding `0..12` follows declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoralFrame {
    Care,
    Harm,
    Fairness,
    Injustice,
    Loyalty,
    Betrayal,
    Authority,
    Subversion,
    Purity,
    Degradation,
    Freedom,
    Oppression,
}

impl MoralFrame {
    pub const COUNT: usize = 12;

    pub const ALL: [MoralFrame; 12] = [
        MoralFrame::Care,
        MoralFrame::Harm,
        MoralFrame::Fairness,
        MoralFrame::Injustice,
        MoralFrame::Loyalty,
        MoralFrame::Betrayal,
        MoralFrame::Authority,
        MoralFrame::Subversion,
        MoralFrame::Purity,
        MoralFrame::Degradation,
        MoralFrame::Freedom,
        MoralFrame::Oppression,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<MoralFrame> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            MoralFrame::Care => "Care",
            MoralFrame::Harm => "Harm",
            MoralFrame::Fairness => "Fairness",
            MoralFrame::Injustice => "Injustice",
            MoralFrame::Loyalty => "Loyalty",
            MoralFrame::Betrayal => "Betrayal",
            MoralFrame::Authority => "Authority",
            MoralFrame::Subversion => "Subversion",
            MoralFrame::Purity => "Purity",
            MoralFrame::Degradation => "Degradation",
            MoralFrame::Freedom => "Freedom",
            MoralFrame::Oppression => "Oppression",
        }
    }
}

impl fmt::Display for MoralFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoralFrame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        MoralFrame::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| format!("unknown moral frame {t:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relevance {
    Relevant,
    SomewhatRelevant,
    Irrelevant,
}

impl Relevance {
    pub const ALL: [Relevance; 3] = [Relevance::Relevant, Relevance::SomewhatRelevant, Relevance::Irrelevant];

    pub fn name(self) -> &'static str {
        match self {
            Relevance::Relevant => "Relevant",
            Relevance::SomewhatRelevant => "SomewhatRelevant",
            Relevance::Irrelevant => "Irrelevant",
        }
    }
}

impl fmt::Display for Relevance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relevance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.trim().chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        match norm.as_str() {
            "relevant" | "r" => Ok(Relevance::Relevant),
            "somewhatrelevant" | "somewhat" | "s" => Ok(Relevance::SomewhatRelevant),
            "irrelevant" | "i" => Ok(Relevance::Irrelevant),
            _ => Err(format!("unknown relevance {s:?}")),
        }
    }
}

/// A human label for one phrase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub phrase_index: usize,
    pub relevance: Relevance,
    pub frame: Option<MoralFrame>,
    pub stance: Option<Stance>,
    pub annotator_id: String,
}
