use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid feature tag {0:?}")]
    InvalidTag(String),

    #[error("empty feature set")]
    EmptyFeatureSet,

    #[error("{context}: line {line}: {reason}")]
    Format {
        context: String,
        line: usize,
        reason: String,
    },

    #[error("invalid rewrite table: {0}")]
    RewriteTable(String),

    #[error("no transcription rule for {character:?} at position {position} in {word:?}")]
    NoRule {
        word: String,
        character: char,
        position: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("split constraint violated: {0}")]
    Constraint(String),

    #[error("invalid probe definition: {0}")]
    Probe(String),

    #[error("probe {probe} targets language {expected}, corpus is {actual}")]
    LanguageMismatch {
        probe: String,
        expected: String,
        actual: String,
    },

    #[error("untranscribable triple {lemma}/{form}: transcription must be applied before splitting")]
    Untranscribable { lemma: String, form: String },

    #[error("prediction/gold mismatch at row {row}: {reason}")]
    Misaligned { row: usize, reason: String },

    #[error("singular design: term {0} is aliased with earlier terms")]
    SingularDesign(String),

    #[error("anova: {0}")]
    Anova(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from bad user input rather than data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::LanguageMismatch { .. })
    }
}
