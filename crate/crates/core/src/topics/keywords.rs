use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lda::TopicSummary;
use crate::corpus::{surface_tokens, Document};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A keyword is accepted when at least this fraction of its sampled
/// documents are marked relevant.
pub const ACCEPT_FRACTION: f64 = 0.8;

/// Static synonym table loaded from `term<TAB>syn1,syn2,...` lines.
#[derive(Debug, Clone, Default)]
pub struct SynonymTable {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (term, syns) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected term<TAB>synonyms".into() })?;
            let entry = map.entry(term.trim().to_lowercase()).or_default();
            entry.extend(syns.split(',').map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty()));
        }
        Ok(SynonymTable { map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn expand(&self, term: &str) -> impl Iterator<Item = &String> {
        self.map.get(term).into_iter().flatten()
    }
}

/// Union of the summaries' top words and their synonyms.
pub fn candidate_keywords<F: Scalar>(summaries: &[TopicSummary<F>], synonyms: &SynonymTable) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in summaries {
        for (w, _) in &s.top_words {
            out.insert(w.clone());
            out.extend(synonyms.expand(w).cloned());
        }
    }
    out
}

/// Reservoir-sample up to `sample_n` documents whose surface tokens contain
/// `keyword`, for manual review. Output preserves corpus order.
pub fn keyword_precision_check(
    keyword: &str,
    corpus: impl IntoIterator<Item = Document>,
    sample_n: usize,
    seed: u64,
) -> Result<Vec<Document>> {
    if sample_n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let keyword = keyword.to_lowercase();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<(usize, Document)> = Vec::with_capacity(sample_n);
    let mut seen = 0usize;
    for doc in corpus {
        if !surface_tokens(&doc.text).contains(&keyword) {
            continue;
        }
        if reservoir.len() < sample_n {
            reservoir.push((seen, doc));
        } else {
            let j = rng.gen_range(0..=seen);
            if j < sample_n {
                reservoir[j] = (seen, doc);
            }
        }
        seen += 1;
    }
    if seen == 0 {
        return Err(Error::KeywordAbsent(keyword));
    }
    reservoir.sort_by_key(|(i, _)| *i);
    Ok(reservoir.into_iter().map(|(_, d)| d).collect())
}

/// One row of a review sheet; `relevant` is `None` until a reviewer fills it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRow {
    pub keyword: String,
    pub doc_id: String,
    pub text: String,
    pub relevant: Option<bool>,
}

/// Tab-separated sheet `keyword, doc_id, text, relevant` with an empty last column.
pub fn render_review_sheet(keyword: &str, docs: &[Document]) -> String {
    let mut s = String::from("keyword\tdoc_id\ttext\trelevant\n");
    for d in docs {
        let text: String = d.text.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect();
        s.push_str(&format!("{keyword}\t{}\t{text}\t\n", d.id));
    }
    s
}

pub fn parse_review_sheet(text: &str) -> Result<Vec<ReviewRow>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.starts_with("keyword\tdoc_id\t") || raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() < 3 {
            return Err(Error::Parse { line: i + 1, message: "expected keyword, doc_id, text, relevant".into() });
        }
        let mark = f.get(3).map(|s| s.trim().to_ascii_lowercase()).unwrap_or_default();
        let relevant = match mark.as_str() {
            "" => None,
            "1" | "y" | "yes" | "true" | "x" => Some(true),
            "0" | "n" | "no" | "false" => Some(false),
            other => return Err(Error::Parse { line: i + 1, message: format!("bad relevance mark {other:?}") }),
        };
        rows.push(ReviewRow { keyword: f[0].to_owned(), doc_id: f[1].to_owned(), text: f[2].to_owned(), relevant });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTally {
    pub keyword: String,
    pub reviewed: usize,
    pub relevant: usize,
    pub accepted: bool,
}

/// Per-keyword counts over a filled sheet. Every row must carry a mark.
pub fn tally_review_sheet(rows: &[ReviewRow]) -> Result<Vec<KeywordTally>> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let rel = r.relevant.ok_or(Error::IncompleteSheet(i + 1))?;
        let c = counts.entry(&r.keyword).or_default();
        c.0 += 1;
        c.1 += rel as usize;
    }
    Ok(counts
        .into_iter()
        .map(|(k, (reviewed, relevant))| KeywordTally {
            keyword: k.to_owned(),
            reviewed,
            relevant,
            // relevant / reviewed >= 0.8, in integers
            accepted: relevant * 5 >= reviewed * 4,
        })
        .collect())
}
