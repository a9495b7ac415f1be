//! Discriminative classifiers over averaged word embeddings, class-imbalance
//! treatments and cross-validated evaluation.

mod classifier;
mod crossval;
mod embedding;
mod eval;
mod imbalance;
mod linear;

pub use classifier::{argmax, Classifier, EmbeddingClassifier, TokenClassifier};
pub use crossval::{
    crossval, random_folds, stratified_folds, ClassifierSpec, CrossValConfig, CrossValReport, ImbalanceStep,
    OversampleTarget,
};
pub use embedding::{featurize, EmbeddingTable, FeatureVector};
pub use eval::{evaluate, evaluate_predictions, ClassMetrics, EvalReport};
pub use imbalance::{adasyn_oversample, augment_external, class_counts, undersample, undersample_all};
pub use linear::{loss_and_gradient, train, Hyper, LinearModel, Task, TrainingMeta};

/// One labeled feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<F> {
    pub features: Vec<F>,
    pub label: usize,
}

impl<F> Sample<F> {
    pub fn new(features: Vec<F>, label: usize) -> Self {
        Sample { features, label }
    }
}
