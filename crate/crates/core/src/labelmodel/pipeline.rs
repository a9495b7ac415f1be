use serde::{Deserialize, Serialize};

use super::em::{predict, LabelDecision, LabelModelParams};
use super::votes::{VoteMatrix, NUM_LFS};
use crate::corpus::{surface_tokens, MoralFrame, Phrase};
use crate::error::{Error, Result};
use crate::learn::{argmax, TokenClassifier};
use crate::lexicon::{match_frames, FrameLexicon};
use crate::scalar::Scalar;

/// A phrase ready for labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseItem {
    pub id: String,
    pub tokens: Vec<String>,
}

impl PhraseItem {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        PhraseItem { id: id.into(), tokens }
    }
}

impl From<&Phrase> for PhraseItem {
    /// Id `doc_id#index`, surface tokens of the phrase text.
    fn from(p: &Phrase) -> Self {
        PhraseItem { id: format!("{}#{}", p.doc_id, p.index), tokens: surface_tokens(&p.text) }
    }
}

/// Run all thirteen labeling functions over `items`.
pub fn apply_lfs<F: Scalar>(
    items: &[PhraseItem],
    lex: &FrameLexicon,
    clf: &dyn TokenClassifier<F>,
    floor: F,
) -> Result<VoteMatrix> {
    if clf.num_classes() != MoralFrame::COUNT {
        return Err(Error::InvalidParameter(format!(
            "frame classifier has {} classes, expected {}",
            clf.num_classes(),
            MoralFrame::COUNT
        )));
    }
    let mut votes = VoteMatrix::new(MoralFrame::COUNT, NUM_LFS);
    let mut row = vec![None; NUM_LFS];
    for item in items {
        row.iter_mut().for_each(|v| *v = None);
        for (frame, _) in match_frames(&item.tokens, lex) {
            row[frame.index()] = Some(frame.index());
        }
        let probs = clf.class_probabilities(&item.tokens);
        let best = argmax(&probs);
        if probs[best] >= floor {
            row[NUM_LFS - 1] = Some(best);
        }
        votes.push_row(&row)?;
    }
    Ok(votes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelSource {
    LabelModel,
    Fallback,
}

impl LabelSource {
    pub fn name(self) -> &'static str {
        match self {
            LabelSource::LabelModel => "label_model",
            LabelSource::Fallback => "fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineLabel {
    pub item_id: String,
    pub frame: MoralFrame,
    pub source: LabelSource,
}

/// Fractions are 0 for an empty input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub model_count: usize,
    pub fallback_count: usize,
    pub model_fraction: f64,
    pub fallback_fraction: f64,
}

impl Coverage {
    fn new(model_count: usize, fallback_count: usize) -> Self {
        let total = model_count + fallback_count;
        let frac = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        Coverage { model_count, fallback_count, model_fraction: frac(model_count), fallback_fraction: frac(fallback_count) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub labels: Vec<PipelineLabel>,
    pub coverage: Coverage,
    pub votes: VoteMatrix,
}

/// Label every item exactly once: the label model's decision where it
/// commits, the classifier's top class where it abstains.
pub fn pipeline_label<F: Scalar>(
    items: &[PhraseItem],
    lex: &FrameLexicon,
    clf: &dyn TokenClassifier<F>,
    params: &LabelModelParams<F>,
    tau: F,
    floor: F,
) -> Result<PipelineOutput> {
    let votes = apply_lfs(items, lex, clf, floor)?;
    if params.num_classes() != MoralFrame::COUNT || params.num_lfs() != NUM_LFS {
        return Err(Error::InvalidParameter("label model parameters do not match the labeling functions".into()));
    }
    let decisions = predict(&votes, params, tau);
    let mut labels = Vec::with_capacity(items.len());
    let (mut model, mut fallback) = (0, 0);
    for (item, d) in items.iter().zip(&decisions) {
        let (class, source) = match d.decision {
            LabelDecision::Class(k) => {
                model += 1;
                (k, LabelSource::LabelModel)
            }
            LabelDecision::Abstain => {
                fallback += 1;
                (argmax(&clf.class_probabilities(&item.tokens)), LabelSource::Fallback)
            }
        };
        let frame = MoralFrame::from_index(class).expect("class index within frame range");
        labels.push(PipelineLabel { item_id: item.id.clone(), frame, source });
    }
    Ok(PipelineOutput { labels, coverage: Coverage::new(model, fallback), votes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;

    /// Always predicts one class with a fixed confidence.
    struct Fixed(usize, f64);

    impl TokenClassifier<f64> for Fixed {
        fn num_classes(&self) -> usize {
            MoralFrame::COUNT
        }

        fn class_probabilities(&self, _: &[String]) -> Vec<f64> {
            let rest = (1.0 - self.1) / 11.0;
            (0..12).map(|k| if k == self.0 { self.1 } else { rest }).collect()
        }
    }

    fn item(id: &str, text: &str) -> PhraseItem {
        PhraseItem::new(id, surface_tokens(text))
    }

    fn lex() -> FrameLexicon {
        parse_lexicon("protect*\tCare\nliberat*\tFreedom\noppress*\tOppression\n").unwrap()
    }

    #[test]
    fn rows_follow_lf_construction() {
        let items = [
            item("a", "protect the vulnerable"),
            item("b", "nothing here"),
            item("c", "liberate us from oppression"),
        ];
        let votes = apply_lfs(&items, &lex(), &Fixed(3, 0.9), 0.6).unwrap();
        let care = MoralFrame::Care.index();
        let row: Vec<_> = votes.row(0).collect();
        assert_eq!(row[care], Some(care));
        assert_eq!(row.iter().filter(|v| v.is_some()).count(), 2);
        assert_eq!(row[12], Some(3));
        let row: Vec<_> = votes.row(1).collect();
        assert_eq!(row.iter().filter(|v| v.is_some()).count(), 1);
        let row: Vec<_> = votes.row(2).collect();
        assert_eq!(row[MoralFrame::Freedom.index()], Some(MoralFrame::Freedom.index()));
        assert_eq!(row[MoralFrame::Oppression.index()], Some(MoralFrame::Oppression.index()));
        let quiet = apply_lfs(&items, &lex(), &Fixed(3, 0.5), 0.6).unwrap();
        assert!(quiet.row(1).all(|v| v.is_none()));
    }

    fn params() -> LabelModelParams<f64> {
        LabelModelParams {
            class_prior: vec![1.0 / 12.0; 12],
            accuracy: vec![0.9; NUM_LFS],
            propensity: vec![0.5; NUM_LFS],
            em_iterations_run: 0,
            log_likelihood: 0.0,
        }
    }

    #[test]
    fn every_item_gets_one_frame() {
        let items = [item("a", "protect"), item("b", "nothing"), item("c", "oppressive"), item("d", "nope")];
        let out = pipeline_label(&items, &lex(), &Fixed(5, 0.3), &params(), 0.5, 0.6).unwrap();
        assert_eq!(out.labels.len(), 4);
        assert_eq!(out.coverage.model_count, 2);
        assert_eq!(out.coverage.fallback_fraction, 0.5);
        assert_eq!(out.labels[0].frame, MoralFrame::Care);
        assert_eq!(out.labels[1].frame, MoralFrame::from_index(5).unwrap());
        assert_eq!(out.labels[1].source, LabelSource::Fallback);
        let empty = pipeline_label(&[], &lex(), &Fixed(5, 0.3), &params(), 0.5, 0.6).unwrap();
        assert!(empty.labels.is_empty());
        assert_eq!(empty.coverage.model_fraction, 0.0);
    }

    #[test]
    fn zero_threshold_with_full_dictionary_coverage_never_falls_back() {
        let items = [item("a", "protect"), item("b", "liberation"), item("c", "oppressed")];
        let out = pipeline_label(&items, &lex(), &Fixed(0, 0.1), &params(), 0.0, 0.6).unwrap();
        assert_eq!(out.coverage.fallback_fraction, 0.0);
    }

    #[test]
    fn phrase_ids() {
        let p = Phrase { doc_id: "d1".into(), index: 2, text: "Stay safe".into(), trigger_terms: vec![] };
        assert_eq!(PhraseItem::from(&p), PhraseItem::new("d1#2", vec!["stay".into(), "safe".into()]));
    }
}
