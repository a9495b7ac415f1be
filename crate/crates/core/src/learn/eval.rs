use super::classifier::Classifier;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics<F> {
    pub precision: F,
    pub recall: F,
    pub f1: F,
    pub support: usize,
}

/// Precision, recall and F1 use 0 wherever the denominator is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F> {
    pub per_class: Vec<ClassMetrics<F>>,
    /// Unweighted mean F1 over classes that appear in gold or predictions.
    pub macro_f1: F,
    pub weighted_f1: F,
    pub accuracy: F,
    /// `confusion[gold][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Per gold class, items that received no prediction. These count
    /// against recall and accuracy.
    pub abstained: Vec<usize>,
}

impl<F: Scalar> EvalReport<F> {
    pub fn num_classes(&self) -> usize {
        self.per_class.len()
    }

    pub fn total(&self) -> usize {
        self.per_class.iter().map(|m| m.support).sum()
    }
}

fn ratio<F: Scalar>(num: usize, den: usize) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::of_usize(num) / F::of_usize(den)
    }
}

/// Score predictions against gold labels. `None` predictions are abstentions.
pub fn evaluate_predictions<F: Scalar>(num_classes: usize, gold: &[usize], predicted: &[Option<usize>]) -> Result<EvalReport<F>> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch(gold.len(), predicted.len()));
    }
    if gold.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let c = num_classes;
    let mut confusion = vec![vec![0usize; c]; c];
    let mut abstained = vec![0usize; c];
    for (&g, p) in gold.iter().zip(predicted) {
        if g >= c || p.is_some_and(|p| p >= c) {
            return Err(Error::InvalidRecord(format!("label outside 0..{c}")));
        }
        match p {
            Some(p) => confusion[g][*p] += 1,
            None => abstained[g] += 1,
        }
    }
    let mut per_class = Vec::with_capacity(c);
    let mut f1s = Vec::new();
    let mut weighted = F::zero();
    for k in 0..c {
        let tp = confusion[k][k];
        let predicted_k: usize = (0..c).map(|g| confusion[g][k]).sum();
        let support = confusion[k].iter().sum::<usize>() + abstained[k];
        let precision: F = ratio(tp, predicted_k);
        let recall: F = ratio(tp, support);
        let f1 = if precision + recall > F::zero() {
            F::of(2.0) * precision * recall / (precision + recall)
        } else {
            F::zero()
        };
        if support > 0 || predicted_k > 0 {
            f1s.push(f1);
        }
        weighted += f1 * F::of_usize(support);
        per_class.push(ClassMetrics { precision, recall, f1, support });
    }
    let n = F::of_usize(gold.len());
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();
    let macro_f1 = if f1s.is_empty() { F::zero() } else { f1s.iter().copied().sum::<F>() / F::of_usize(f1s.len()) };
    Ok(EvalReport {
        per_class,
        macro_f1,
        weighted_f1: weighted / n,
        accuracy: F::of_usize(correct) / n,
        confusion,
        abstained,
    })
}

pub fn evaluate<F: Scalar, M: Classifier<F> + ?Sized>(model: &M, features: &[Vec<F>], labels: &[usize]) -> Result<EvalReport<F>> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch(features.len(), labels.len()));
    }
    if let Some(x) = features.iter().find(|x| x.len() != model.input_dim()) {
        return Err(Error::LengthMismatch(x.len(), model.input_dim()));
    }
    let predicted: Vec<Option<usize>> = features.iter().map(|x| Some(model.predict(x))).collect();
    evaluate_predictions(model.num_classes(), labels, &predicted)
}
