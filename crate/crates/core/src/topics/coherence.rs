use std::collections::{HashMap, HashSet};

use super::lda::{top_words, LdaModel};
use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// UMass coherence of ranked word lists against a reference corpus.
///
/// For each list, averages `ln((D(w_i, w_j) + 1) / D(w_j))` over pairs with
/// `w_j` ranked above `w_i`, where `D` counts documents. Pairs whose
/// conditioning word never occurs are skipped; the result is the mean over
/// lists with at least one scored pair, or `-inf` if there is none.
pub fn umass_coherence<F: Scalar>(topics: &[Vec<String>], corpus: &[TokenizedDocument]) -> F {
    let wanted: HashSet<&str> = topics.iter().flatten().map(String::as_str).collect();
    let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
    for (d, doc) in corpus.iter().enumerate() {
        let present: HashSet<&str> = doc.tokens.iter().map(String::as_str).filter(|t| wanted.contains(t)).collect();
        for t in present {
            postings.entry(t).or_default().push(d);
        }
    }
    let df = |w: &str| postings.get(w).map_or(0, Vec::len);
    let co_df = |a: &str, b: &str| -> usize {
        let (Some(x), Some(y)) = (postings.get(a), postings.get(b)) else { return 0 };
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    };

    let mut per_topic = Vec::new();
    for words in topics {
        let mut sum = F::zero();
        let mut pairs = 0usize;
        for i in 1..words.len() {
            for j in 0..i {
                let d_j = df(&words[j]);
                if d_j == 0 {
                    continue;
                }
                let joint = co_df(&words[i], &words[j]);
                sum += (F::of_usize(joint + 1) / F::of_usize(d_j)).ln();
                pairs += 1;
            }
        }
        if pairs > 0 {
            per_topic.push(sum / F::of_usize(pairs));
        }
    }
    if per_topic.is_empty() {
        return F::neg_infinity();
    }
    let n = F::of_usize(per_topic.len());
    per_topic.into_iter().sum::<F>() / n
}

/// Mean UMass coherence of every topic's `top_n` words.
pub fn coherence<F: Scalar>(model: &LdaModel<F>, corpus: &[TokenizedDocument], top_n: usize) -> Result<F> {
    if top_n < 2 {
        return Err(Error::InvalidParameter(format!("coherence needs top_n >= 2, got {top_n}")));
    }
    let lists = (0..model.num_topics).map(|k| top_words(model, k, top_n).map(|s| s.words())).collect::<Result<Vec<_>>>()?;
    Ok(umass_coherence(&lists, corpus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[&str]]) -> Vec<TokenizedDocument> {
        docs.iter()
            .map(|d| TokenizedDocument {
                doc_id: String::new(),
                tokens: d.iter().map(|s| s.to_string()).collect(),
                hashtags: vec![],
            })
            .collect()
    }

    fn list(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_co_occurrence() {
        let docs: Vec<&[&str]> = vec![&["a", "b"]; 20];
        let c: f64 = umass_coherence(&[list(&["a", "b"])], &corpus(&docs));
        assert!((c - (21.0f64 / 20.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn never_co_occurring() {
        // a in 10 docs, b in 10 other docs, 80 docs without either
        let mut docs: Vec<&[&str]> = Vec::new();
        docs.extend(std::iter::repeat_n(&["a"][..], 10));
        docs.extend(std::iter::repeat_n(&["b"][..], 10));
        docs.extend(std::iter::repeat_n(&["z"][..], 80));
        let c: f64 = umass_coherence(&[list(&["a", "b"])], &corpus(&docs));
        assert!((c - (0.1f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn more_co_occurrence_scores_higher() {
        let docs = corpus(&[&["a", "b", "c"], &["a", "b"], &["a", "c"], &["d", "e"], &["d"], &["e", "f"]]);
        let tight: f64 = umass_coherence(&[list(&["a", "b", "c"])], &docs);
        let loose: f64 = umass_coherence(&[list(&["a", "d", "f"])], &docs);
        assert!(tight > loose);
    }

    #[test]
    fn unknown_words_and_short_lists() {
        let docs = corpus(&[&["a"]]);
        assert_eq!(umass_coherence::<f64>(&[list(&["x", "y"])], &docs), f64::NEG_INFINITY);
    }

    #[test]
    fn document_order_does_not_matter() {
        let mut docs = corpus(&[&["a", "b"], &["b", "c"], &["a", "c", "d"], &["d"]]);
        let topics = [list(&["a", "b", "c", "d"]), list(&["d", "c"])];
        let before: f64 = umass_coherence(&topics, &docs);
        docs.reverse();
        docs.swap(0, 2);
        assert_eq!(before, umass_coherence::<f64>(&topics, &docs));
    }
}
