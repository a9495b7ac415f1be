//! Weak supervision over moral frames.
//!
//! Thirteen labeling functions vote on each phrase: twelve dictionary
//! functions (one per frame, in frame encoding order) and one classifier
//! function. A one-coin Dawid–Skene model with per-function propensities is
//! fit to the votes by EM; its posterior either labels a phrase or abstains,
//! and abstentions fall through to the classifier.

mod em;
mod pipeline;
mod votes;

pub use em::{em_fit, em_fit_traced, majority_vote, predict, EmConfig, LabelDecision, LabelModelParams, ProbabilisticLabel};
pub use pipeline::{apply_lfs, pipeline_label, Coverage, LabelSource, PhraseItem, PipelineLabel, PipelineOutput};
pub use votes::{standard_labeling_functions, LabelingFunction, LfKind, VoteMatrix, ABSTAIN, CLASSIFIER_LF, NUM_LFS};
