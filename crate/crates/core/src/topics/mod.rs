//! LDA topic modeling by collapsed Gibbs sampling, UMass coherence, and the
//! keyword-discovery helpers built on top of topic summaries.

mod coherence;
mod keywords;
mod lda;

pub use coherence::{coherence, umass_coherence};
pub use keywords::{
    candidate_keywords, keyword_precision_check, parse_review_sheet, render_review_sheet, tally_review_sheet,
    KeywordTally, ReviewRow, SynonymTable, ACCEPT_FRACTION,
};
pub use lda::{lda_fit, lda_fit_observed, top_words, LdaModel, LdaParams, TopicSummary};
