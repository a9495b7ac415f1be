use std::fmt;

use moralframe::Error as CoreError;
use serde_json::json;

/// Failure classes with fixed process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or missing seed. Exit 2.
    Config(String),
    /// Unreadable or malformed input. Exit 3.
    Data(String),
    /// A computation could not be carried out on valid input. Exit 4.
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Compute(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Data(_) => "DataError",
            CliError::Compute(_) => "ComputeError",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Compute(m) => m,
        }
    }

    /// Single-line JSON record for stderr.
    pub fn record(&self) -> String {
        json!({ "error": self.kind(), "message": self.message(), "exit_code": self.exit_code() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let m = e.to_string();
        match e {
            CoreError::InvalidParameter(_) => CliError::Config(m),
            CoreError::Io(_)
            | CoreError::Parse { .. }
            | CoreError::UnknownFrame { .. }
            | CoreError::InvalidRecord(_)
            | CoreError::Format(_)
            | CoreError::EmptyCorpus
            | CoreError::EmptyVocabulary
            | CoreError::EmptyDocument(_)
            | CoreError::KeywordAbsent(_)
            | CoreError::IncompleteSheet(_)
            | CoreError::LengthMismatch(..) => CliError::Data(m),
            CoreError::TopicOutOfRange { .. }
            | CoreError::DegenerateInput(_)
            | CoreError::InsufficientMinority { .. }
            | CoreError::SingleClassInput
            | CoreError::TooFewSamples(_)
            | CoreError::EmptyTestSet
            | CoreError::ZeroMarginal(_)
            | CoreError::SingularDesign(_)
            | CoreError::DegenerateMarginals
            | CoreError::InsufficientRatings => CliError::Compute(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
