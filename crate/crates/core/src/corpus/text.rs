use std::collections::HashSet;
use std::sync::OnceLock;

use regex::Regex;
use rust_stemmers::{Algorithm, Stemmer};

use super::{Document, TokenizedDocument};
use crate::error::{Error, Result};

/// The standard 179-word English stopword list, one word per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").unwrap())
}

fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#(\w+)").unwrap())
}

pub fn strip_urls(text: &str) -> String {
    url_re().replace_all(text, " ").into_owned()
}

/// Lowercased hashtags in text order, '#' removed. URLs should already be stripped.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    hashtag_re().captures_iter(text).map(|c| c[1].to_lowercase()).collect()
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '`')
}

/// Lowercase, drop punctuation and split on whitespace.
///
/// Apostrophes are deleted ("don't" → "dont"); every other non-alphanumeric
/// character becomes a separator.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut cleaned = String::with_capacity(lowered.len());
    for c in lowered.chars() {
        if c.is_alphanumeric() {
            cleaned.push(c);
        } else if !is_apostrophe(c) {
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().map(str::to_owned).collect()
}

/// URL-free, lowercase, punctuation-free tokens before stopword removal and
/// stemming. Keyword and lexicon matching run on these.
pub fn surface_tokens(text: &str) -> Vec<String> {
    tokenize(&strip_urls(text))
}

/// Text normalizer: strip URLs → extract hashtags → lowercase → strip
/// punctuation → whitespace tokenize → drop stopwords → stem.
pub struct Preprocessor {
    stopwords: HashSet<String>,
    stemmer: Stemmer,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Self::new(super::parse_word_list(DEFAULT_STOPWORDS))
    }
}

impl Preprocessor {
    pub fn new(stopwords: impl IntoIterator<Item = String>) -> Self {
        Preprocessor {
            // stored in tokenized form so "don't" matches the token "dont"
            stopwords: stopwords.into_iter().flat_map(|w| tokenize(&w)).collect(),
            stemmer: Stemmer::create(Algorithm::English),
        }
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn stem(&self, token: &str) -> String {
        self.stemmer.stem(token).into_owned()
    }

    pub fn process(&self, doc: &Document) -> TokenizedDocument {
        let no_urls = strip_urls(&doc.text);
        let hashtags = extract_hashtags(&no_urls);
        let tokens = tokenize(&no_urls)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| self.stem(&t))
            .collect();
        TokenizedDocument { doc_id: doc.id.clone(), tokens, hashtags }
    }
}

/// One-shot form of [`Preprocessor::process`].
pub fn preprocess(doc: &Document, stopwords: &HashSet<String>) -> TokenizedDocument {
    Preprocessor::new(stopwords.iter().cloned()).process(doc)
}

/// Keyword-based relevance filter over surface tokens.
#[derive(Debug, Clone)]
pub struct KeywordFilter {
    keywords: HashSet<String>,
    exclude_retweets: bool,
}

impl KeywordFilter {
    pub fn new(keywords: impl IntoIterator<Item = String>, exclude_retweets: bool) -> Result<Self> {
        let keywords: HashSet<String> = keywords.into_iter().collect();
        if keywords.is_empty() {
            return Err(Error::InvalidParameter("keyword set is empty".into()));
        }
        if let Some(bad) = keywords.iter().find(|k| k.is_empty() || k.to_lowercase() != **k) {
            return Err(Error::InvalidParameter(format!("keyword {bad:?} must be non-empty lowercase")));
        }
        Ok(KeywordFilter { keywords, exclude_retweets })
    }

    pub fn keywords(&self) -> &HashSet<String> {
        &self.keywords
    }

    pub fn matches(&self, doc: &Document) -> bool {
        if self.exclude_retweets && doc.is_retweet {
            return false;
        }
        surface_tokens(&doc.text).iter().any(|t| self.keywords.contains(t))
    }
}

pub fn keyword_filter<'a, I>(corpus: I, filter: &'a KeywordFilter) -> impl Iterator<Item = Document> + 'a
where
    I: IntoIterator<Item = Document>,
    I::IntoIter: 'a,
{
    corpus.into_iter().filter(move |d| filter.matches(d))
}
