use std::collections::HashSet;

use super::Document;

/// Lowercase and collapse whitespace runs.
pub fn normalize_for_dedupe(text: &str) -> String {
    text.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// Streaming exact-match deduplicator keyed on normalized text. The first
/// occurrence wins.
#[derive(Debug, Default)]
pub struct Deduplicator {
    seen: HashSet<String>,
    total: usize,
    removed: usize,
}

impl Deduplicator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` if the document is new.
    pub fn admit(&mut self, doc: &Document) -> bool {
        self.total += 1;
        let fresh = self.seen.insert(normalize_for_dedupe(&doc.text));
        if !fresh {
            self.removed += 1;
        }
        fresh
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn removed(&self) -> usize {
        self.removed
    }

    /// Fraction of documents seen so far that were dropped; 0 for an empty stream.
    pub fn duplicate_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.removed as f64 / self.total as f64
        }
    }
}

pub fn dedupe(corpus: impl IntoIterator<Item = Document>) -> (Vec<Document>, f64) {
    let mut d = Deduplicator::new();
    let kept: Vec<Document> = corpus.into_iter().filter(|doc| d.admit(doc)).collect();
    (kept, d.duplicate_fraction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn docs(texts: &[&str]) -> Vec<Document> {
        texts.iter().enumerate().map(|(i, t)| Document::new(i.to_string(), *t, 0)).collect()
    }

    #[test]
    fn one_duplicate_in_ten() {
        let texts: Vec<String> = (0..9).map(|i| format!("tweet {i}")).collect();
        let mut refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        refs.push("Tweet   3");
        let (kept, frac) = dedupe(docs(&refs));
        assert_eq!(kept.len(), 9);
        assert_eq!(frac, 0.1);
    }

    #[test]
    fn all_unique() {
        let (kept, frac) = dedupe(docs(&["a", "b", "c"]));
        assert_eq!(kept.len(), 3);
        assert_eq!(frac, 0.0);
    }

    #[test]
    fn eight_per_mille_duplicates() {
        // 992 unique texts plus 8 repeats of the first one
        let mut texts: Vec<String> = (0..992).map(|i| format!("t{i}")).collect();
        texts.extend(std::iter::repeat_n("t0".to_string(), 8));
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let (_, frac) = dedupe(docs(&refs));
        assert!((frac - 0.008).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn second_pass_removes_nothing(texts in proptest::collection::vec("[ab ]{0,4}", 0..30)) {
            let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
            let (once, _) = dedupe(docs(&refs));
            let (twice, frac) = dedupe(once.clone());
            prop_assert_eq!(once, twice);
            prop_assert_eq!(frac, 0.0);
        }
    }
}
