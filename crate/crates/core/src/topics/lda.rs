use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const DUMP_MAGIC: &str = "# lda-counts v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaParams<F> {
    pub num_topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: F,
    /// Symmetric topic-word prior.
    pub beta: F,
    pub iterations: usize,
    pub seed: u64,
}

impl<F: Scalar> LdaParams<F> {
    /// α = 50/K, β = 0.01, 1000 sweeps.
    pub fn with_defaults(num_topics: usize, seed: u64) -> Self {
        LdaParams {
            num_topics,
            alpha: F::of(50.0) / F::of_usize(num_topics.max(1)),
            beta: F::of(0.01),
            iterations: 1000,
            seed,
        }
    }
}

/// Fitted count state of a collapsed Gibbs LDA run.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel<F> {
    pub num_topics: usize,
    pub alpha: F,
    pub beta: F,
    pub vocab: Vec<String>,
    /// K × V.
    pub topic_word_counts: Vec<Vec<u32>>,
    /// Per-topic totals, `topic_totals[k] = Σ_w topic_word_counts[k][w]`.
    pub topic_totals: Vec<u64>,
    /// D × K.
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicSummary<F> {
    pub topic_id: usize,
    pub top_words: Vec<(String, F)>,
}

impl<F: Scalar> TopicSummary<F> {
    pub fn words(&self) -> Vec<String> {
        self.top_words.iter().map(|(w, _)| w.clone()).collect()
    }
}

impl<F: Scalar> LdaModel<F> {
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn word_id(&self, term: &str) -> Option<usize> {
        self.vocab.binary_search_by(|v| v.as_str().cmp(term)).ok()
    }

    /// Smoothed `p(w | k) = (n_kw + β)/(n_k + Vβ)` over the whole vocabulary.
    pub fn topic_word_distribution(&self, topic: usize) -> Result<Vec<F>> {
        self.check_topic(topic)?;
        let denom = F::from_u64(self.topic_totals[topic]).unwrap() + F::of_usize(self.vocab_size()) * self.beta;
        Ok(self.topic_word_counts[topic].iter().map(|&c| (F::from_u32(c).unwrap() + self.beta) / denom).collect())
    }

    fn check_topic(&self, topic: usize) -> Result<()> {
        if topic >= self.num_topics {
            Err(Error::TopicOutOfRange { topic, num_topics: self.num_topics })
        } else {
            Ok(())
        }
    }

    /// Plain-text count dump: a header, the vocabulary (one term per line),
    /// then the K×V topic-word and D×K document-topic grids as
    /// space-separated integers.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{DUMP_MAGIC}").unwrap();
        writeln!(s, "num_topics {}", self.num_topics).unwrap();
        writeln!(s, "alpha {}", self.alpha).unwrap();
        writeln!(s, "beta {}", self.beta).unwrap();
        writeln!(s, "seed {}", self.rng_seed).unwrap();
        writeln!(s, "vocab {}", self.vocab.len()).unwrap();
        for v in &self.vocab {
            writeln!(s, "{v}").unwrap();
        }
        writeln!(s, "topic_word {}", self.num_topics).unwrap();
        for row in &self.topic_word_counts {
            writeln!(s, "{}", join(row)).unwrap();
        }
        writeln!(s, "doc_topic {}", self.doc_topic_counts.len()).unwrap();
        for row in &self.doc_topic_counts {
            writeln!(s, "{}", join(row)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.as_bytes().lines().enumerate().map(|(i, l)| (i + 1, l.unwrap_or_default()));
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines.next().ok_or_else(|| Error::Parse { line: 0, message: format!("unexpected end, wanted {what}") })
        };
        let (line, magic) = next("header")?;
        if magic.trim() != DUMP_MAGIC {
            return Err(Error::Parse { line, message: "not an LDA count dump".into() });
        }
        fn field<T: std::str::FromStr>(line: usize, text: &str, key: &str) -> Result<T> {
            text.strip_prefix(key)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse { line, message: format!("expected `{key} <value>`") })
        }
        let (l, t) = next("num_topics")?;
        let num_topics: usize = field(l, &t, "num_topics")?;
        let (l, t) = next("alpha")?;
        let alpha: f64 = field(l, &t, "alpha")?;
        let (l, t) = next("beta")?;
        let beta: f64 = field(l, &t, "beta")?;
        let (l, t) = next("seed")?;
        let rng_seed: u64 = field(l, &t, "seed")?;
        let (l, t) = next("vocab")?;
        let v: usize = field(l, &t, "vocab")?;
        let mut vocab = Vec::with_capacity(v);
        for _ in 0..v {
            vocab.push(next("term")?.1);
        }
        let parse_row = |line: usize, text: &str, len: usize| -> Result<Vec<u32>> {
            let row: Vec<u32> = text
                .split_whitespace()
                .map(|x| x.parse().map_err(|e| Error::Parse { line, message: format!("{e}") }))
                .collect::<Result<_>>()?;
            if row.len() != len {
                return Err(Error::Parse { line, message: format!("expected {len} counts, got {}", row.len()) });
            }
            Ok(row)
        };
        let (l, t) = next("topic_word")?;
        let k: usize = field(l, &t, "topic_word")?;
        let mut topic_word_counts = Vec::with_capacity(k);
        for _ in 0..k {
            let (l, t) = next("topic row")?;
            topic_word_counts.push(parse_row(l, &t, v)?);
        }
        let (l, t) = next("doc_topic")?;
        let d: usize = field(l, &t, "doc_topic")?;
        let mut doc_topic_counts = Vec::with_capacity(d);
        for _ in 0..d {
            let (l, t) = next("document row")?;
            doc_topic_counts.push(parse_row(l, &t, num_topics)?);
        }
        if k != num_topics {
            return Err(Error::Parse { line: 0, message: "topic_word rows disagree with num_topics".into() });
        }
        let topic_totals = topic_word_counts.iter().map(|r| r.iter().map(|&c| c as u64).sum()).collect();
        Ok(LdaModel {
            num_topics,
            alpha: F::of(alpha),
            beta: F::of(beta),
            vocab,
            topic_word_counts,
            topic_totals,
            doc_topic_counts,
            rng_seed,
        })
    }
}

fn join(row: &[u32]) -> String {
    row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Rank words of one topic by smoothed probability, ties broken by term.
pub fn top_words<F: Scalar>(model: &LdaModel<F>, topic: usize, n: usize) -> Result<TopicSummary<F>> {
    let probs = model.topic_word_distribution(topic)?;
    let mut ranked: Vec<(usize, F)> = probs.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| model.vocab[a.0].cmp(&model.vocab[b.0]))
    });
    ranked.truncate(n);
    Ok(TopicSummary {
        topic_id: topic,
        top_words: ranked.into_iter().map(|(w, p)| (model.vocab[w].clone(), p)).collect(),
    })
}

pub fn lda_fit<F: Scalar>(corpus: &[TokenizedDocument], params: &LdaParams<F>) -> Result<LdaModel<F>> {
    lda_fit_observed(corpus, params, |_, _| {})
}

/// [`lda_fit`] calling `observer(sweep, &model)` after every Gibbs sweep.
pub fn lda_fit_observed<F: Scalar>(
    corpus: &[TokenizedDocument],
    params: &LdaParams<F>,
    mut observer: impl FnMut(usize, &LdaModel<F>),
) -> Result<LdaModel<F>> {
    let k = params.num_topics;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 topics, got {k}")));
    }
    if !(params.alpha > F::zero() && params.beta > F::zero()) {
        return Err(Error::InvalidParameter("alpha and beta must be positive".into()));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocab: Vec<String> =
        corpus.iter().flat_map(|d| d.tokens.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    if let Some(i) = corpus.iter().position(|d| d.tokens.is_empty()) {
        return Err(Error::EmptyDocument(i));
    }
    let v = vocab.len();
    let docs: Vec<Vec<usize>> = corpus
        .iter()
        .map(|d| d.tokens.iter().map(|t| vocab.binary_search(t).expect("token in vocab")).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = LdaModel {
        num_topics: k,
        alpha: params.alpha,
        beta: params.beta,
        vocab,
        topic_word_counts: vec![vec![0; v]; k],
        topic_totals: vec![0; k],
        doc_topic_counts: vec![vec![0; k]; docs.len()],
        rng_seed: params.seed,
    };
    let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(docs.len());
    for (d, words) in docs.iter().enumerate() {
        let z: Vec<usize> = words.iter().map(|_| rng.gen_range(0..k)).collect();
        for (&w, &t) in words.iter().zip(&z) {
            model.topic_word_counts[t][w] += 1;
            model.topic_totals[t] += 1;
            model.doc_topic_counts[d][t] += 1;
        }
        assignments.push(z);
    }

    let v_beta = F::of_usize(v) * params.beta;
    let mut weights = vec![F::zero(); k];
    for sweep in 0..params.iterations {
        for (d, words) in docs.iter().enumerate() {
            for (i, &w) in words.iter().enumerate() {
                let old = assignments[d][i];
                model.topic_word_counts[old][w] -= 1;
                model.topic_totals[old] -= 1;
                model.doc_topic_counts[d][old] -= 1;

                let mut total = F::zero();
                for (t, slot) in weights.iter_mut().enumerate() {
                    let n_dk = F::from_u32(model.doc_topic_counts[d][t]).unwrap();
                    let n_kw = F::from_u32(model.topic_word_counts[t][w]).unwrap();
                    let n_k = F::from_u64(model.topic_totals[t]).unwrap();
                    total += (n_dk + params.alpha) * (n_kw + params.beta) / (n_k + v_beta);
                    *slot = total;
                }
                let u = F::of(rng.gen::<f64>()) * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                assignments[d][i] = new;
                model.topic_word_counts[new][w] += 1;
                model.topic_totals[new] += 1;
                model.doc_topic_counts[d][new] += 1;
            }
        }
        observer(sweep, &model);
    }
    Ok(model)
}
