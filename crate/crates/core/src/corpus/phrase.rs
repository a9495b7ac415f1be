use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use super::{tokenize, Document, Phrase};
use crate::lexicon::{match_frames, FrameLexicon};

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").unwrap())
}

fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#\w+").unwrap())
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ';')
}

struct Candidate {
    start: usize,
    is_hashtag: bool,
    text: String,
    tokens: Vec<String>,
}

/// Split a document into keyword-bearing phrases.
///
/// Sentences are cut at `.`, `!`, `?` and `;`; URLs are blanked first so
/// their dots do not split anything. Each hashtag is a separate candidate and
/// is excluded from the sentence it sits in. Only candidates containing a
/// lexicon term are kept, indexed from 0 in text order.
pub fn segment_phrases(doc: &Document, lex: &FrameLexicon) -> Vec<Phrase> {
    let mut masked = doc.text.clone();
    for m in url_re().find_iter(&doc.text) {
        masked.replace_range(m.range(), &" ".repeat(m.len()));
    }

    let mut candidates = Vec::new();
    for m in hashtag_re().find_iter(&masked) {
        candidates.push(Candidate {
            start: m.start(),
            is_hashtag: true,
            text: m.as_str().to_owned(),
            tokens: vec![m.as_str()[1..].to_lowercase()],
        });
    }

    let mut seg_start = 0;
    let push_sentence = |from: usize, to: usize, candidates: &mut Vec<Candidate>| {
        let raw = &masked[from..to];
        let trimmed = raw.trim_start();
        let start = from + (raw.len() - trimmed.len());
        let text = trimmed.trim_end();
        if text.is_empty() {
            return;
        }
        let without_tags = hashtag_re().replace_all(text, " ");
        candidates.push(Candidate {
            start,
            is_hashtag: false,
            text: text.split_whitespace().collect::<Vec<_>>().join(" "),
            tokens: tokenize(&without_tags),
        });
    };
    for (i, c) in masked.char_indices() {
        if is_sentence_end(c) {
            push_sentence(seg_start, i, &mut candidates);
            seg_start = i + c.len_utf8();
        }
    }
    push_sentence(seg_start, masked.len(), &mut candidates);

    candidates.sort_by_key(|c| (c.start, c.is_hashtag));
    candidates
        .into_iter()
        .filter_map(|c| {
            let terms: BTreeSet<String> = match_frames(&c.tokens, lex).into_iter().map(|(_, t)| t).collect();
            (!terms.is_empty()).then(|| (c.text, terms.into_iter().collect::<Vec<_>>()))
        })
        .enumerate()
        .map(|(index, (text, trigger_terms))| Phrase { doc_id: doc.id.clone(), index, text, trigger_terms })
        .collect()
}
