use std::fmt::Write as _;
use std::str::FromStr;

use super::classifier::Classifier;
use super::Sample;
use crate::corpus::{MoralFrame, Stance};
use crate::error::{Error, Result};
use crate::scalar::{order_independent_sum, Scalar};

const MODEL_MAGIC: &str = "# linear-model v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    /// Relevant (0) vs. irrelevant (1).
    Relevance,
    /// For, Against, Undecided.
    Stance,
    /// The twelve moral frames.
    Frame,
}

impl Task {
    pub fn num_classes(self) -> usize {
        match self {
            Task::Relevance => 2,
            Task::Stance => 3,
            Task::Frame => MoralFrame::COUNT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Relevance => "relevance",
            Task::Stance => "stance",
            Task::Frame => "frame",
        }
    }

    pub fn class_names(self) -> Vec<&'static str> {
        match self {
            Task::Relevance => vec!["Relevant", "Irrelevant"],
            Task::Stance => Stance::ALL.iter().map(|s| s.name()).collect(),
            Task::Frame => MoralFrame::ALL.iter().map(|f| f.name()).collect(),
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relevance" => Ok(Task::Relevance),
            "stance" => Ok(Task::Stance),
            "frame" | "moral-frame" => Ok(Task::Frame),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper<F> {
    pub epochs: usize,
    pub learning_rate: F,
    pub l2: F,
    /// Recorded in the training metadata. Training starts from zero weights
    /// and is deterministic regardless of the seed.
    pub seed: u64,
}

impl<F: Scalar> Default for Hyper<F> {
    fn default() -> Self {
        Hyper { epochs: 500, learning_rate: F::of(0.1), l2: F::of(1e-4), seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingMeta<F> {
    pub epochs: usize,
    pub learning_rate: F,
    pub l2: F,
    pub seed: u64,
    pub final_loss: F,
}

/// Multinomial logistic regression. `weights[c]` has `dim + 1` entries, the
/// last being the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<F> {
    pub task: Task,
    pub weights: Vec<Vec<F>>,
    pub meta: TrainingMeta<F>,
}

fn softmax_into<F: Scalar>(weights: &[Vec<F>], x: &[F], out: &mut [F], scratch: &mut Vec<F>) {
    let dim = x.len();
    for (o, w) in out.iter_mut().zip(weights) {
        let mut z = w[dim];
        for (wi, xi) in w[..dim].iter().zip(x) {
            z += *wi * *xi;
        }
        *o = z;
    }
    let max = out.iter().copied().fold(F::neg_infinity(), F::max);
    out.iter_mut().for_each(|z| *z = (*z - max).exp());
    scratch.clear();
    scratch.extend_from_slice(out);
    // sorted summation keeps the normalizer identical under class relabeling
    let total = order_independent_sum(scratch);
    out.iter_mut().for_each(|e| *e /= total);
}

/// Mean cross-entropy plus `(l2/2)·‖W‖²` over non-bias weights, and its
/// gradient with the same shape as `weights`.
pub fn loss_and_gradient<F: Scalar>(weights: &[Vec<F>], data: &[Sample<F>], l2: F) -> (F, Vec<Vec<F>>) {
    let c = weights.len();
    let dim = weights[0].len() - 1;
    let n = F::of_usize(data.len());
    let mut grad = vec![vec![F::zero(); dim + 1]; c];
    let mut probs = vec![F::zero(); c];
    let mut scratch = Vec::with_capacity(c);
    let mut loss = F::zero();
    for s in data {
        softmax_into(weights, &s.features, &mut probs, &mut scratch);
        loss -= probs[s.label].max(F::min_positive_value()).ln();
        for (k, g) in grad.iter_mut().enumerate() {
            let r = probs[k] - if k == s.label { F::one() } else { F::zero() };
            for (gi, xi) in g[..dim].iter_mut().zip(&s.features) {
                *gi += r * *xi;
            }
            g[dim] += r;
        }
    }
    loss /= n;
    let half = F::of(0.5);
    for (g, w) in grad.iter_mut().zip(weights) {
        for i in 0..=dim {
            g[i] /= n;
            if i < dim {
                g[i] += l2 * w[i];
                loss += half * l2 * w[i] * w[i];
            }
        }
    }
    (loss, grad)
}

/// Full-batch gradient descent from zero weights.
///
/// The L2 term is applied as a proximal step, `W ← (W − η∇)/(1 + ηλ)`, which
/// has the same fixed point as plain descent on the regularized loss and
/// stays stable for any penalty strength. The bias is not penalized.
pub fn train<F: Scalar>(data: &[Sample<F>], task: Task, hyper: &Hyper<F>) -> Result<LinearModel<F>> {
    let c = task.num_classes();
    let first = data.first().ok_or(Error::SingleClassInput)?;
    let dim = first.features.len();
    if let Some(s) = data.iter().find(|s| s.features.len() != dim) {
        return Err(Error::LengthMismatch(s.features.len(), dim));
    }
    if let Some(s) = data.iter().find(|s| s.label >= c) {
        return Err(Error::InvalidRecord(format!("label {} outside task {} ({} classes)", s.label, task.name(), c)));
    }
    if data.iter().all(|s| s.label == first.label) {
        return Err(Error::SingleClassInput);
    }
    let lr = hyper.learning_rate;
    let shrink = F::one() / (F::one() + lr * hyper.l2);
    let mut weights = vec![vec![F::zero(); dim + 1]; c];
    for _ in 0..hyper.epochs {
        let (_, grad) = loss_and_gradient(&weights, data, F::zero());
        for (w, g) in weights.iter_mut().zip(&grad) {
            for i in 0..=dim {
                w[i] -= lr * g[i];
                if i < dim {
                    w[i] *= shrink;
                }
            }
        }
    }
    let (final_loss, _) = loss_and_gradient(&weights, data, hyper.l2);
    Ok(LinearModel {
        task,
        weights,
        meta: TrainingMeta {
            epochs: hyper.epochs,
            learning_rate: lr,
            l2: hyper.l2,
            seed: hyper.seed,
            final_loss,
        },
    })
}

impl<F: Scalar> LinearModel<F> {
    pub fn dim(&self) -> usize {
        self.weights[0].len() - 1
    }

    /// Plain-text weight dump: header keys, then one row of `dim + 1`
    /// weights per class (bias last).
    pub fn to_text(&self) -> String {
        let mut s = format!("{MODEL_MAGIC}\n");
        writeln!(s, "task={}", self.task.name()).unwrap();
        writeln!(s, "dim={}", self.dim()).unwrap();
        writeln!(s, "classes={}", self.weights.len()).unwrap();
        writeln!(s, "labels={}", self.task.class_names().join(",")).unwrap();
        writeln!(s, "epochs={}", self.meta.epochs).unwrap();
        writeln!(s, "learning_rate={}", self.meta.learning_rate).unwrap();
        writeln!(s, "l2={}", self.meta.l2).unwrap();
        writeln!(s, "seed={}", self.meta.seed).unwrap();
        writeln!(s, "final_loss={}", self.meta.final_loss).unwrap();
        writeln!(s, "weights").unwrap();
        for row in &self.weights {
            let cells: Vec<String> = row.iter().map(|w| w.to_string()).collect();
            writeln!(s, "{}", cells.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, m: &str| Error::Parse { line, message: m.to_owned() };
        match lines.next() {
            Some((_, l)) if l.trim() == MODEL_MAGIC => {}
            _ => return Err(bad(1, "not a linear model dump")),
        }
        let mut header = std::collections::HashMap::new();
        for (i, l) in lines.by_ref() {
            if l.trim() == "weights" {
                break;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| bad(i + 1, "expected key=value"))?;
            header.insert(k.trim().to_owned(), (i + 1, v.trim().to_owned()));
        }
        fn get<T: FromStr>(h: &std::collections::HashMap<String, (usize, String)>, key: &str) -> Result<T> {
            let (line, v) = h.get(key).ok_or(Error::Parse { line: 0, message: format!("missing {key}") })?;
            v.parse().map_err(|_| Error::Parse { line: *line, message: format!("bad value for {key}") })
        }
        let task: Task = {
            let (line, v) = header.get("task").ok_or(bad(0, "missing task"))?;
            v.parse().map_err(|m: String| bad(*line, &m))?
        };
        let dim: usize = get(&header, "dim")?;
        let classes: usize = get(&header, "classes")?;
        if classes != task.num_classes() {
            return Err(bad(0, "class count does not match task"));
        }
        let mut weights = Vec::with_capacity(classes);
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let row = l
                .split_whitespace()
                .map(|x| x.parse::<f64>().map(F::of).map_err(|_| bad(i + 1, "bad weight")))
                .collect::<Result<Vec<F>>>()?;
            if row.len() != dim + 1 {
                return Err(bad(i + 1, "weight row has the wrong length"));
            }
            weights.push(row);
        }
        if weights.len() != classes {
            return Err(bad(0, "wrong number of weight rows"));
        }
        let meta = TrainingMeta {
            epochs: get(&header, "epochs")?,
            learning_rate: F::of(get::<f64>(&header, "learning_rate")?),
            l2: F::of(get::<f64>(&header, "l2")?),
            seed: get(&header, "seed")?,
            final_loss: F::of(get::<f64>(&header, "final_loss")?),
        };
        Ok(LinearModel { task, weights, meta })
    }
}

impl<F: Scalar> Classifier<F> for LinearModel<F> {
    fn num_classes(&self) -> usize {
        self.weights.len()
    }

    fn input_dim(&self) -> usize {
        self.dim()
    }

    fn predict_proba(&self, x: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.weights.len()];
        let mut scratch = Vec::with_capacity(out.len());
        softmax_into(&self.weights, x, &mut out, &mut scratch);
        out
    }
}
