//! Lexicon-and-rule sentiment scoring.
//!
//! Token valences are summed after two local rules: a run of boosters
//! directly before a valence term pushes it away from zero (or toward zero
//! for negative increments), and a negation among the three preceding tokens
//! multiplies it by −0.74. The raw sum is squashed into (−1, 1) by
//! `raw / √(raw² + 15)` and trichotomized at ±0.25 with strict inequalities.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{surface_tokens, Document};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEMO_VALENCE: &str = include_str!("../data/valence_demo.tsv");
pub const DEFAULT_NEGATIONS: &str = include_str!("../data/negations_en.txt");
pub const DEFAULT_BOOSTERS: &str = include_str!("../data/boosters_en.txt");

pub const NEGATION_WINDOW: usize = 3;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const BOOSTER_INCREMENT: f64 = 0.293;
pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const LABEL_CUTOFF: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "Positive",
            SentimentLabel::Neutral => "Neutral",
            SentimentLabel::Negative => "Negative",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentScore<F> {
    pub compound: F,
    pub label: SentimentLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValenceLexicon<F> {
    pub valence: HashMap<String, F>,
    pub negations: HashSet<String>,
    pub boosters: HashMap<String, F>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_number<F: Scalar>(line: usize, s: &str) -> Result<F> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse { line, message: format!("bad number {s:?}") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, message: "non-finite value".into() });
    }
    Ok(F::of(v))
}

/// `term<TAB>valence` lines.
pub fn parse_valence<F: Scalar>(text: &str) -> Result<HashMap<String, F>> {
    content_lines(text)
        .map(|(line, l)| {
            let (term, v) = l.split_once('\t').ok_or(Error::Parse { line, message: "expected term<TAB>valence".into() })?;
            Ok((term.trim().to_lowercase(), parse_number(line, v)?))
        })
        .collect()
}

pub fn parse_negations(text: &str) -> HashSet<String> {
    content_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

/// `term` or `term<TAB>increment`.
pub fn parse_boosters<F: Scalar>(text: &str) -> Result<HashMap<String, F>> {
    content_lines(text)
        .map(|(line, l)| match l.split_once('\t') {
            Some((term, inc)) => Ok((term.trim().to_lowercase(), parse_number(line, inc)?)),
            None => Ok((l.to_lowercase(), F::of(BOOSTER_INCREMENT))),
        })
        .collect()
}

impl<F: Scalar> ValenceLexicon<F> {
    pub fn new(valence: HashMap<String, F>, negations: HashSet<String>, boosters: HashMap<String, F>) -> Self {
        let lex = ValenceLexicon { valence, negations, boosters };
        let overlaps = lex.overlaps();
        if !overlaps.is_empty() {
            log::warn!("terms with both a valence and a rule role: {}", overlaps.into_iter().collect::<Vec<_>>().join(", "));
        }
        lex
    }

    /// The shipped demo valences with the default negation and booster lists.
    pub fn demo() -> Self {
        Self::new(
            parse_valence(DEMO_VALENCE).expect("demo lexicon parses"),
            parse_negations(DEFAULT_NEGATIONS),
            parse_boosters(DEFAULT_BOOSTERS).expect("booster list parses"),
        )
    }

    /// Missing negation or booster paths fall back to the shipped lists.
    pub fn load(valence: impl AsRef<Path>, negations: Option<&Path>, boosters: Option<&Path>) -> Result<Self> {
        let valence = parse_valence(&std::fs::read_to_string(valence)?)?;
        let negations = match negations {
            Some(p) => parse_negations(&std::fs::read_to_string(p)?),
            None => parse_negations(DEFAULT_NEGATIONS),
        };
        let boosters = match boosters {
            Some(p) => parse_boosters(&std::fs::read_to_string(p)?)?,
            None => parse_boosters(DEFAULT_BOOSTERS)?,
        };
        Ok(Self::new(valence, negations, boosters))
    }

    /// Terms that carry a valence and are also negations or boosters.
    pub fn overlaps(&self) -> BTreeSet<String> {
        self.valence
            .keys()
            .filter(|t| self.negations.contains(*t) || self.boosters.contains_key(*t))
            .cloned()
            .collect()
    }

    /// The same lexicon with every valence sign-flipped.
    pub fn negated(&self) -> Self {
        ValenceLexicon {
            valence: self.valence.iter().map(|(t, v)| (t.clone(), -*v)).collect(),
            negations: self.negations.clone(),
            boosters: self.boosters.clone(),
        }
    }
}

pub fn normalize<F: Scalar>(raw: F) -> F {
    raw / (raw * raw + F::of(NORMALIZATION_ALPHA)).sqrt()
}

pub fn label_for<F: Scalar>(compound: F) -> SentimentLabel {
    let cut = F::of(LABEL_CUTOFF);
    if compound > cut {
        SentimentLabel::Positive
    } else if compound < -cut {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

/// Rule-adjusted valence sum before normalization.
pub fn raw_valence<F: Scalar>(tokens: &[String], lex: &ValenceLexicon<F>) -> F {
    let mut raw = F::zero();
    for (i, tok) in tokens.iter().enumerate() {
        let Some(&base) = lex.valence.get(tok) else { continue };
        let mut v = base;
        let sign = if base < F::zero() { -F::one() } else { F::one() };
        for prev in tokens[..i].iter().rev() {
            match lex.boosters.get(prev) {
                Some(&inc) => v += sign * inc,
                None => break,
            }
        }
        if tokens[i.saturating_sub(NEGATION_WINDOW)..i].iter().any(|t| lex.negations.contains(t)) {
            v *= F::of(NEGATION_SCALAR);
        }
        raw += v;
    }
    raw
}

pub fn score<F: Scalar>(tokens: &[String], lex: &ValenceLexicon<F>) -> SentimentScore<F> {
    let compound = normalize(raw_valence(tokens, lex));
    SentimentScore { compound, label: label_for(compound) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSentiment<F> {
    /// `(doc_id, score)` in input order.
    pub scores: Vec<(String, SentimentScore<F>)>,
    /// Mean compound per UTC day; days without documents are absent.
    pub daily_mean: BTreeMap<NaiveDate, F>,
}

pub fn utc_day(created_at: i64) -> NaiveDate {
    DateTime::from_timestamp(created_at, 0).map(|d| d.date_naive()).unwrap_or(NaiveDate::MIN)
}

/// Mean of values per day.
pub fn daily_means<F: Scalar>(values: impl IntoIterator<Item = (NaiveDate, F)>) -> BTreeMap<NaiveDate, F> {
    let mut sums: BTreeMap<NaiveDate, (F, usize)> = BTreeMap::new();
    for (day, v) in values {
        let e = sums.entry(day).or_insert((F::zero(), 0));
        e.0 += v;
        e.1 += 1;
    }
    sums.into_iter().map(|(d, (s, n))| (d, s / F::of_usize(n))).collect()
}

/// Score each document's surface tokens and average by UTC day.
pub fn batch_score<F: Scalar>(docs: &[Document], lex: &ValenceLexicon<F>) -> BatchSentiment<F> {
    let scores: Vec<(String, SentimentScore<F>)> =
        docs.iter().map(|d| (d.id.clone(), score(&surface_tokens(&d.text), lex))).collect();
    let daily_mean = daily_means(docs.iter().zip(&scores).map(|(d, (_, s))| (utc_day(d.created_at), s.compound)));
    BatchSentiment { scores, daily_mean }
}
