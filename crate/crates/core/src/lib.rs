//! Moral-frame and stance analytics for short social-media texts.
//!
//! The crate covers the full annotation pipeline: corpus normalization and
//! keyword filtering ([`corpus`]), LDA keyword discovery ([`topics`]), the
//! moral-frame dictionary ([`lexicon`]), a generative label model over
//! labeling functions ([`labelmodel`]), embedding-based linear classifiers
//! with imbalance treatments ([`learn`]), lexicon sentiment ([`sentiment`])
//! and the statistics used to characterize the labeled corpus
//! ([`analysis`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod labelmodel;
pub mod learn;
pub mod lexicon;
pub mod scalar;
pub mod sentiment;
pub mod special;
pub mod topics;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type LdaModel = topics::LdaModel<f64>;
pub type TopicSummary = topics::TopicSummary<f64>;
pub type LabelModelParams = labelmodel::LabelModelParams<f64>;
pub type ProbabilisticLabel = labelmodel::ProbabilisticLabel<f64>;
pub type EmbeddingTable = learn::EmbeddingTable<f64>;
pub type FeatureVector = learn::FeatureVector<f64>;
pub type Sample = learn::Sample<f64>;
pub type LinearModel = learn::LinearModel<f64>;
pub type EvalReport = learn::EvalReport<f64>;
pub type ValenceLexicon = sentiment::ValenceLexicon<f64>;
pub type SentimentScore = sentiment::SentimentScore<f64>;
pub type ResidualReport = analysis::ResidualReport<f64>;
pub type RegressionFit = analysis::RegressionFit<f64>;
pub type ViralitySeries = analysis::ViralitySeries<f64>;
