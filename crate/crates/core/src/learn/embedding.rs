use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Word vectors loaded from the plain `word v1 ... vd` text format.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<F> {
    dim: usize,
    vectors: HashMap<String, Vec<F>>,
}

impl<F: Scalar> EmbeddingTable<F> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable { dim, vectors: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, term: impl Into<String>, vector: Vec<F>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Format(format!("vector of length {} in a {}-d table", vector.len(), self.dim)));
        }
        self.vectors.insert(term.into(), vector);
        Ok(())
    }

    pub fn get(&self, term: &str) -> Option<&[F]> {
        self.vectors.get(term).map(Vec::as_slice)
    }

    /// Parse the text format. A leading `count dim` header line (word2vec
    /// style) is skipped; the dimension is taken from the first vector.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut table: Option<EmbeddingTable<F>> = None;
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values: Vec<&str> = parts.collect();
            if i == 0 && values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
                continue;
            }
            let vector = values
                .iter()
                .map(|v| v.parse::<f64>().map(F::of))
                .collect::<std::result::Result<Vec<F>, _>>()
                .map_err(|e| Error::Parse { line: i + 1, message: format!("bad component: {e}") })?;
            let t = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
            t.insert(word, vector).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        }
        table.ok_or_else(|| Error::Format("embedding file has no vectors".into()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }
}

/// Averaged embedding of a token list.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<F> {
    pub values: Vec<F>,
    /// Fraction of tokens without a vector; 1 for an empty token list.
    pub oov_fraction: F,
}

/// Mean of the in-vocabulary token vectors (repeats count). OOV tokens are
/// skipped; if nothing is found the result is the zero vector.
pub fn featurize<F: Scalar>(tokens: &[String], emb: &EmbeddingTable<F>) -> FeatureVector<F> {
    let mut values = vec![F::zero(); emb.dim()];
    let mut found = 0usize;
    for t in tokens {
        if let Some(v) = emb.get(t) {
            values.iter_mut().zip(v).for_each(|(a, &b)| *a += b);
            found += 1;
        }
    }
    if found > 0 {
        let n = F::of_usize(found);
        values.iter_mut().for_each(|a| *a /= n);
    }
    let oov_fraction =
        if tokens.is_empty() { F::one() } else { F::of_usize(tokens.len() - found) / F::of_usize(tokens.len()) };
    FeatureVector { values, oov_fraction }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> EmbeddingTable<f64> {
        EmbeddingTable::from_reader("a 1 0\nb 0 1\n".as_bytes()).unwrap()
    }

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn mean_of_two() {
        let f = featurize(&toks(&["a", "b"]), &table());
        assert_eq!(f.values, vec![0.5, 0.5]);
        assert_eq!(f.oov_fraction, 0.0);
    }

    #[test]
    fn all_oov_is_zero() {
        let f = featurize(&toks(&["x", "y"]), &table());
        assert_eq!(f.values, vec![0.0, 0.0]);
        assert_eq!(f.oov_fraction, 1.0);
        assert_eq!(featurize(&[], &table()).oov_fraction, 1.0);
    }

    #[test]
    fn repeats_are_weighted() {
        let f = featurize(&toks(&["a", "a", "b", "zzz"]), &table());
        assert!((f.values[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.values[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.oov_fraction, 0.25);
    }

    #[test]
    fn header_line_and_ragged_rows() {
        let t = EmbeddingTable::<f64>::from_reader("2 3\nx 1 2 3\ny 4 5 6\n".as_bytes()).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert!(EmbeddingTable::<f64>::from_reader("x 1 2\ny 1\n".as_bytes()).is_err());
        assert!(EmbeddingTable::<f64>::from_reader("".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn token_order_does_not_matter(mut idx in proptest::collection::vec(0usize..3, 0..10)) {
            let words = ["a", "b", "c"];
            let t = table();
            let fwd: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
            let before = featurize(&fwd, &t);
            idx.reverse();
            let rev: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
            let after = featurize(&rev, &t);
            for (x, y) in before.values.iter().zip(&after.values) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert_eq!(before.oov_fraction, after.oov_fraction);
        }
    }
}
