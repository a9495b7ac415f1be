//! Moral Foundations dictionary: term and stem patterns mapped to frames.
//!
//! Lexicon files are UTF-8, one `pattern<TAB>FrameName` per line, with '#'
//! comment lines. A trailing '*' marks a prefix (stem) pattern. Patterns are
//! tokenized like running text, so a hyphenated entry such as `self-determ*`
//! becomes a two-token pattern that matches adjacent tokens
//! (`self determination`); every other pattern matches a single token.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::corpus::{tokenize, MoralFrame};
use crate::error::{Error, Result};

/// Seed lexicon shipped with the crate: the Freedom stems quoted for the
/// Liberty extension plus a few illustrative entries per frame. The full
/// dictionary is supplied by the user.
pub const SEED_LEXICON: &str = include_str!("../data/seed_lexicon.tsv");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexiconEntry {
    /// Lowercase pattern without the trailing '*'.
    pub pattern: String,
    pub is_prefix: bool,
    pub frame: MoralFrame,
}

#[derive(Debug, Clone, Default)]
pub struct FrameLexicon {
    entries: Vec<LexiconEntry>,
    exact: HashMap<String, Vec<MoralFrame>>,
    prefix: HashMap<String, Vec<MoralFrame>>,
    /// (pattern tokens, last token is a prefix, frame)
    phrases: Vec<(Vec<String>, bool, MoralFrame)>,
}

impl FrameLexicon {
    pub fn new(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut lex = FrameLexicon::default();
        let mut seen = BTreeSet::new();
        for e in entries {
            if seen.insert(e.clone()) {
                lex.index(&e);
                lex.entries.push(e);
            }
        }
        lex
    }

    fn index(&mut self, e: &LexiconEntry) {
        let parts = tokenize(&e.pattern);
        match parts.as_slice() {
            [] => {}
            [single] => {
                let map = if e.is_prefix { &mut self.prefix } else { &mut self.exact };
                let frames = map.entry(single.clone()).or_default();
                if !frames.contains(&e.frame) {
                    frames.push(e.frame);
                }
            }
            _ => self.phrases.push((parts, e.is_prefix, e.frame)),
        }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Frames with no entry. A complete lexicon returns an empty list.
    pub fn missing_frames(&self) -> Vec<MoralFrame> {
        MoralFrame::ALL.iter().copied().filter(|f| !self.entries.iter().any(|e| e.frame == *f)).collect()
    }

    fn token_frames<'a>(&'a self, token: &'a str) -> impl Iterator<Item = MoralFrame> + 'a {
        let exact = self.exact.get(token).into_iter().flatten().copied();
        let prefixes = token
            .char_indices()
            .map(|(i, c)| i + c.len_utf8())
            .filter_map(move |end| self.prefix.get(&token[..end]))
            .flatten()
            .copied();
        exact.chain(prefixes)
    }
}

pub fn parse_lexicon(text: &str) -> Result<FrameLexicon> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (pattern, frame) = trimmed
            .split_once('\t')
            .ok_or_else(|| Error::Parse { line, message: "expected pattern<TAB>frame".into() })?;
        let frame_name = frame.trim();
        let frame: MoralFrame =
            frame_name.parse().map_err(|_| Error::UnknownFrame { line, name: frame_name.to_owned() })?;
        let pattern = pattern.trim().to_lowercase();
        let (pattern, is_prefix) = match pattern.strip_suffix('*') {
            Some(stem) => (stem.to_owned(), true),
            None => (pattern, false),
        };
        if tokenize(&pattern).is_empty() {
            return Err(Error::Parse { line, message: "empty pattern".into() });
        }
        entries.push(LexiconEntry { pattern, is_prefix, frame });
    }
    Ok(FrameLexicon::new(entries))
}

/// Load a lexicon file, logging a warning that lists any frame without entries.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<FrameLexicon> {
    let lex = parse_lexicon(&std::fs::read_to_string(path.as_ref())?)?;
    let missing = lex.missing_frames();
    if !missing.is_empty() {
        let names: Vec<&str> = missing.iter().map(|f| f.name()).collect();
        log::warn!("lexicon {} has no entries for: {}", path.as_ref().display(), names.join(", "));
    }
    Ok(lex)
}

/// Every (frame, matched token) pair found in `tokens`.
///
/// Tokens are lowercase and unstemmed. Multi-token patterns report the
/// matched tokens joined with '-'.
pub fn match_frames(tokens: &[String], lex: &FrameLexicon) -> BTreeSet<(MoralFrame, String)> {
    let mut out = BTreeSet::new();
    for t in tokens {
        for f in lex.token_frames(t) {
            out.insert((f, t.clone()));
        }
    }
    for (parts, is_prefix, frame) in &lex.phrases {
        let n = parts.len();
        if tokens.len() < n {
            continue;
        }
        for window in tokens.windows(n) {
            let head_ok = window[..n - 1] == parts[..n - 1];
            let last = &window[n - 1];
            let tail_ok = if *is_prefix { last.starts_with(&parts[n - 1]) } else { *last == parts[n - 1] };
            if head_ok && tail_ok {
                out.insert((*frame, window.join("-")));
            }
        }
    }
    out
}

/// Result of the dictionary keyword baseline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeywordMatch {
    None,
    Single(MoralFrame),
    /// Sorted by frame index.
    Multiple(Vec<MoralFrame>),
}

impl KeywordMatch {
    pub fn frames(&self) -> &[MoralFrame] {
        match self {
            KeywordMatch::None => &[],
            KeywordMatch::Single(f) => std::slice::from_ref(f),
            KeywordMatch::Multiple(fs) => fs,
        }
    }

    /// Prediction used when scoring against a gold frame: any matched frame
    /// equal to gold counts as a hit; otherwise the lowest-index match;
    /// `None` when nothing matched.
    pub fn prediction_for(&self, gold: MoralFrame) -> Option<MoralFrame> {
        let frames = self.frames();
        if frames.contains(&gold) {
            Some(gold)
        } else {
            frames.first().copied()
        }
    }
}

pub fn keyword_classify(tokens: &[String], lex: &FrameLexicon) -> KeywordMatch {
    let frames: BTreeSet<MoralFrame> = match_frames(tokens, lex).into_iter().map(|(f, _)| f).collect();
    let mut frames: Vec<MoralFrame> = frames.into_iter().collect();
    match frames.len() {
        0 => KeywordMatch::None,
        1 => KeywordMatch::Single(frames.remove(0)),
        _ => KeywordMatch::Multiple(frames),
    }
}
