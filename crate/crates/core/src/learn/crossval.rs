use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classifier::Classifier;
use super::eval::{evaluate_predictions, EvalReport};
use super::imbalance::{adasyn_oversample, augment_external, class_counts, undersample};
use super::linear::{train, Hyper, Task};
use super::Sample;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_sizes(n: usize, folds: usize) -> Result<()> {
    if folds < 2 || n < folds {
        return Err(Error::TooFewSamples(format!("{n} items for {folds} folds")));
    }
    Ok(())
}

/// Fold index per item. Each class is shuffled and dealt round-robin, with
/// the deal continuing across classes so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    check_sizes(labels.len(), folds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

pub fn random_folds(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    check_sizes(n, folds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (pos, i) in order.into_iter().enumerate() {
        assignment[i] = pos % folds;
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec<F> {
    Logistic(Hyper<F>),
    /// Uniformly random class per item; the usual chance baseline.
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OversampleTarget {
    /// Raise every class to the size of the largest one.
    MatchMajority,
    Fixed(usize),
}

/// A training-fold transformation. Steps run in order; test folds are never
/// touched.
#[derive(Debug, Clone, PartialEq)]
pub enum ImbalanceStep<F> {
    Undersample { class: usize, cap: usize },
    Oversample { target: OversampleTarget, k: usize },
    Augment { external: Vec<Sample<F>>, per_class_target: usize, k: usize },
}

impl<F: Scalar> ImbalanceStep<F> {
    pub fn apply(&self, fold: Vec<Sample<F>>, seed: u64) -> Result<Vec<Sample<F>>> {
        match self {
            ImbalanceStep::Undersample { class, cap } => undersample(&fold, *class, *cap, seed),
            ImbalanceStep::Oversample { target, k } => {
                let counts = class_counts(&fold);
                let goal = match target {
                    OversampleTarget::MatchMajority => counts.values().copied().max().unwrap_or(0),
                    OversampleTarget::Fixed(n) => *n,
                };
                let targets = counts.keys().map(|&c| (c, goal)).collect();
                adasyn_oversample(&fold, &targets, *k, seed)
            }
            ImbalanceStep::Augment { external, per_class_target, k } => {
                augment_external(&fold, external, *per_class_target, *k, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValConfig<F> {
    pub folds: usize,
    pub stratified: bool,
    pub plan: Vec<ImbalanceStep<F>>,
    pub grid: Vec<ClassifierSpec<F>>,
    pub seed: u64,
}

impl<F: Scalar> CrossValConfig<F> {
    pub fn new(grid: Vec<ClassifierSpec<F>>, seed: u64) -> Self {
        CrossValConfig { folds: 5, stratified: true, plan: Vec::new(), grid, seed }
    }
}

/// One report per grid entry, computed over predictions pooled across all
/// test folds.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValReport<F> {
    pub fold_of: Vec<usize>,
    pub reports: Vec<EvalReport<F>>,
    /// Grid index with the highest weighted F1; the earliest wins ties.
    pub best: usize,
}

pub fn crossval<F: Scalar>(data: &[Sample<F>], task: Task, config: &CrossValConfig<F>) -> Result<CrossValReport<F>> {
    if config.grid.is_empty() {
        return Err(Error::InvalidParameter("empty hyperparameter grid".into()));
    }
    let labels: Vec<usize> = data.iter().map(|s| s.label).collect();
    let fold_of = if config.stratified {
        stratified_folds(&labels, config.folds, config.seed)?
    } else {
        random_folds(data.len(), config.folds, config.seed)?
    };
    let c = task.num_classes();
    let mut reports = Vec::with_capacity(config.grid.len());
    for (g, spec) in config.grid.iter().enumerate() {
        let mut predicted: Vec<Option<usize>> = vec![None; data.len()];
        for fold in 0..config.folds {
            let step_seed = config.seed ^ ((g as u64) << 32 | fold as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let test: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == fold).collect();
            match spec {
                ClassifierSpec::UniformRandom => {
                    let mut rng = ChaCha8Rng::seed_from_u64(step_seed);
                    for i in test {
                        predicted[i] = Some(rng.gen_range(0..c));
                    }
                }
                ClassifierSpec::Logistic(hyper) => {
                    let mut training: Vec<Sample<F>> =
                        data.iter().zip(&fold_of).filter(|(_, &f)| f != fold).map(|(s, _)| s.clone()).collect();
                    for (s, step) in config.plan.iter().enumerate() {
                        training = step.apply(training, step_seed.wrapping_add(s as u64 + 1))?;
                    }
                    let model = train(&training, task, hyper)?;
                    for i in test {
                        predicted[i] = Some(model.predict(&data[i].features));
                    }
                }
            }
        }
        reports.push(evaluate_predictions(c, &labels, &predicted)?);
    }
    let mut best = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.weighted_f1 > reports[best].weighted_f1 {
            best = i;
        }
    }
    Ok(CrossValReport { fold_of, reports, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stratified_five_fold_of_eighty_twenty() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i >= 80)).collect();
        let folds = stratified_folds(&labels, 5, 11).unwrap();
        for f in 0..5 {
            let a = (0..100).filter(|&i| folds[i] == f && labels[i] == 0).count();
            let b = (0..100).filter(|&i| folds[i] == f && labels[i] == 1).count();
            assert!(a.abs_diff(16) <= 1 && b.abs_diff(4) <= 1, "fold {f}: {a}/{b}");
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 11).unwrap());
    }

    #[test]
    fn rejects_too_few() {
        assert!(matches!(stratified_folds(&[0, 1], 3, 0), Err(Error::TooFewSamples(_))));
        assert!(matches!(random_folds(10, 1, 0), Err(Error::TooFewSamples(_))));
    }

    fn blobs() -> Vec<Sample<f64>> {
        (0..60)
            .map(|i| {
                let y = i % 3;
                let t = i as f64 * 0.37;
                Sample::new(vec![3.0 * y as f64 + t.sin() * 0.5, -2.0 * y as f64 + t.cos() * 0.5], y)
            })
            .collect()
    }

    #[test]
    fn logistic_beats_random_and_is_chosen() {
        let grid = vec![ClassifierSpec::UniformRandom, ClassifierSpec::Logistic(Hyper { epochs: 200, ..Hyper::default() })];
        let config = CrossValConfig::new(grid, 5);
        let r = crossval(&blobs(), Task::Stance, &config).unwrap();
        assert_eq!(r.best, 1);
        assert!(r.reports[1].weighted_f1 > 0.95);
        assert_eq!(r, crossval(&blobs(), Task::Stance, &config).unwrap());
    }

    #[test]
    fn plan_applies_to_training_only() {
        let mut data = blobs();
        data.truncate(50);
        let config = CrossValConfig {
            plan: vec![ImbalanceStep::Oversample { target: OversampleTarget::MatchMajority, k: 3 }],
            ..CrossValConfig::new(vec![ClassifierSpec::Logistic(Hyper { epochs: 50, ..Hyper::default() })], 2)
        };
        let r = crossval(&data, Task::Stance, &config).unwrap();
        assert_eq!(r.reports[0].total(), data.len());
    }

    proptest! {
        #[test]
        fn folds_partition(labels in prop::collection::vec(0usize..4, 10..200), k in 2usize..10, seed in any::<u64>()) {
            let folds = stratified_folds(&labels, k, seed).unwrap();
            prop_assert_eq!(folds.len(), labels.len());
            prop_assert!(folds.iter().all(|&f| f < k));
            let sizes: Vec<usize> = (0..k).map(|f| folds.iter().filter(|&&x| x == f).count()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
