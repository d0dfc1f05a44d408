use botgate_core::corpus::CorpusError;
use botgate_core::eval::EvalError;
use botgate_core::features::FeatureError;
use botgate_core::model::ModelError;
use botgate_github::GithubError;
use botgate_rating::RatingError;

/// Failure of one command. Each variant has its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Credential(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Io(String),
    /// Input that parses but cannot be used (a single class, an empty set...).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Credential(_) => 2,
            CliError::NotFound(_) => 3,
            CliError::Model(_) => 4,
            CliError::Io(_) => 5,
            CliError::Usage(_) => 64,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GithubError> for CliError {
    fn from(e: GithubError) -> Self {
        let msg = e.to_string();
        match e {
            GithubError::MissingToken | GithubError::Credential { .. } => CliError::Credential(msg),
            GithubError::NotFound(_) => CliError::NotFound(msg),
            GithubError::RepositorySyntax(_) | GithubError::InvalidLimits(_) => CliError::Usage(msg),
            _ => CliError::Io(msg),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::RepositorySyntax(_) | CorpusError::Filter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::SchemaMismatch { .. } => CliError::Model(e.to_string()),
            FeatureError::NoComments(_) | FeatureError::Batch(_) | FeatureError::MissingLabels => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RatingError> for CliError {
    fn from(e: RatingError) -> Self {
        CliError::Io(e.to_string())
    }
}
