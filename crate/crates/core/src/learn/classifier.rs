use super::embedding::{featurize, EmbeddingTable};
use super::linear::LinearModel;
use crate::scalar::Scalar;

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// A model over dense feature vectors.
pub trait Classifier<F: Scalar> {
    fn num_classes(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn predict_proba(&self, x: &[F]) -> Vec<F>;

    fn predict(&self, x: &[F]) -> usize {
        argmax(&self.predict_proba(x))
    }
}

/// A model over token sequences.
pub trait TokenClassifier<F: Scalar> {
    fn num_classes(&self) -> usize;
    fn class_probabilities(&self, tokens: &[String]) -> Vec<F>;
}

/// Mean-embedding featurization followed by a linear model.
#[derive(Debug, Clone)]
pub struct EmbeddingClassifier<'a, F> {
    pub model: &'a LinearModel<F>,
    pub embeddings: &'a EmbeddingTable<F>,
}

impl<'a, F: Scalar> EmbeddingClassifier<'a, F> {
    pub fn new(model: &'a LinearModel<F>, embeddings: &'a EmbeddingTable<F>) -> Self {
        EmbeddingClassifier { model, embeddings }
    }
}

impl<F: Scalar> TokenClassifier<F> for EmbeddingClassifier<'_, F> {
    fn num_classes(&self) -> usize {
        self.model.num_classes()
    }

    fn class_probabilities(&self, tokens: &[String]) -> Vec<F> {
        let fv = featurize(tokens, self.embeddings);
        self.model.predict_proba(&fv.values)
    }
}
