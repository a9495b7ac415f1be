use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{Document, GoldAnnotation, MoralFrame, Relevance, Stance};
use crate::error::{Error, Result};

pub(super) mod timestamp {
    use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(secs: &i64, s: S) -> Result<S::Ok, S::Error> {
        match DateTime::<Utc>::from_timestamp(*secs, 0) {
            Some(dt) => s.serialize_str(&dt.format("%Y-%m-%dT%H:%M:%SZ").to_string()),
            None => s.serialize_i64(*secs),
        }
    }

    pub fn parse(text: &str) -> Option<i64> {
        let t = text.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(t) {
            return Some(dt.timestamp());
        }
        if let Ok(n) = NaiveDateTime::parse_from_str(t, "%Y-%m-%dT%H:%M:%S") {
            return Some(n.and_utc().timestamp());
        }
        if let Ok(n) = NaiveDateTime::parse_from_str(t, "%Y-%m-%d %H:%M:%S") {
            return Some(n.and_utc().timestamp());
        }
        if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
            return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
        }
        t.parse::<i64>().ok()
    }

    struct TsVisitor;

    impl Visitor<'_> for TsVisitor {
        type Value = i64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an ISO-8601 timestamp or integer seconds")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<i64, E> {
            Ok(v)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<i64, E> {
            i64::try_from(v).map_err(E::custom)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<i64, E> {
            parse(v).ok_or_else(|| E::custom(format!("bad timestamp {v:?}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        d.deserialize_any(TsVisitor)
    }
}

/// Prefix of the provenance record that may open a JSONL artifact.
pub const MANIFEST_RECORD: &str = "{\"_manifest\"";

/// Streaming reader over a line-delimited JSON corpus. Blank lines and
/// `{"_manifest": ...}` provenance records are skipped.
pub struct DocumentReader<R> {
    lines: std::io::Lines<BufReader<R>>,
    line_no: usize,
}

impl<R: Read> DocumentReader<R> {
    pub fn new(reader: R) -> Self {
        DocumentReader { lines: BufReader::new(reader).lines(), line_no: 0 }
    }
}

impl<R: Read> Iterator for DocumentReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() || line.trim_start().starts_with(MANIFEST_RECORD) {
                continue;
            }
            let parsed = serde_json::from_str::<Document>(&line)
                .map_err(|e| Error::Parse { line: self.line_no, message: e.to_string() })
                .and_then(|d| {
                    if d.id.is_empty() {
                        Err(Error::Parse { line: self.line_no, message: "empty document id".into() })
                    } else {
                        Ok(d)
                    }
                });
            return Some(parsed);
        }
    }
}

pub fn read_documents(path: impl AsRef<Path>) -> Result<DocumentReader<File>> {
    Ok(DocumentReader::new(File::open(path)?))
}

/// One entry per line; blank lines and lines starting with '#' are ignored.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

pub fn read_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    Ok(parse_word_list(&std::fs::read_to_string(path)?))
}

fn optional<T: std::str::FromStr<Err = String>>(field: &str, line: usize) -> Result<Option<T>> {
    let f = field.trim();
    if f.is_empty() || f == "-" || f.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        f.parse().map(Some).map_err(|message| Error::Parse { line, message })
    }
}

/// Parse tab-separated gold annotations:
/// `doc_id, phrase_index, relevance, frame, stance, annotator_id`.
///
/// A first line whose second field is not an integer is treated as a header.
pub fn parse_gold_annotations(text: &str) -> Result<Vec<GoldAnnotation>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if out.is_empty() && fields.get(1).is_some_and(|f| f.trim().parse::<usize>().is_err()) {
            continue;
        }
        if fields.len() != 6 {
            return Err(Error::Parse { line, message: format!("expected 6 fields, found {}", fields.len()) });
        }
        let phrase_index = fields[1]
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line, message: format!("phrase_index: {e}") })?;
        let relevance: Relevance = fields[2].parse().map_err(|message| Error::Parse { line, message })?;
        let frame: Option<MoralFrame> = optional(fields[3], line)?;
        let stance: Option<Stance> = optional(fields[4], line)?;
        out.push(GoldAnnotation {
            doc_id: fields[0].trim().to_owned(),
            phrase_index,
            relevance,
            frame,
            stance,
            annotator_id: fields[5].trim().to_owned(),
        });
    }
    validate_annotations(&out)?;
    Ok(out)
}

/// Frame and stance only on relevant phrases; one stance per document and annotator.
pub fn validate_annotations(annotations: &[GoldAnnotation]) -> Result<()> {
    let mut stance_of: HashMap<(&str, &str), Stance> = HashMap::new();
    for a in annotations {
        if a.relevance != Relevance::Relevant && (a.frame.is_some() || a.stance.is_some()) {
            return Err(Error::InvalidRecord(format!(
                "{}#{}: frame/stance given on a {} phrase",
                a.doc_id, a.phrase_index, a.relevance
            )));
        }
        if let Some(s) = a.stance {
            let prev = *stance_of.entry((&a.doc_id, &a.annotator_id)).or_insert(s);
            if prev != s {
                return Err(Error::InvalidRecord(format!(
                    "document {} carries conflicting stances {prev} and {s}",
                    a.doc_id
                )));
            }
        }
    }
    Ok(())
}
