use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown moral frame {name:?} at line {line}")]
    UnknownFrame { line: usize, name: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("empty vocabulary: no tokens survive preprocessing")]
    EmptyVocabulary,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("document {0} has no tokens")]
    EmptyDocument(usize),
    #[error("topic {topic} out of range (model has {num_topics} topics)")]
    TopicOutOfRange { topic: usize, num_topics: usize },
    #[error("no document contains keyword {0:?}")]
    KeywordAbsent(String),
    #[error("review sheet row {0} has no relevance mark")]
    IncompleteSheet(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("class {class} has {count} samples; at least 2 are needed to oversample")]
    InsufficientMinority { class: usize, count: usize },
    #[error("training data contains a single class")]
    SingleClassInput,
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("empty test set")]
    EmptyTestSet,
    #[error("format error: {0}")]
    Format(String),

    #[error("contingency table has an all-zero {0}")]
    ZeroMarginal(String),
    #[error("singular design matrix: {0}")]
    SingularDesign(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("chance agreement is 1 but observed agreement is not")]
    DegenerateMarginals,
    #[error("no unit carries two or more ratings")]
    InsufficientRatings,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
