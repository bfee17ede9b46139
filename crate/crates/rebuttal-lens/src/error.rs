use std::path::PathBuf;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus line {line}: {message}")]
    CorpusParse { line: usize, message: String },

    #[error("duplicate submission id `{id}`")]
    DuplicateSubmission { id: String },

    #[error("embedding file line {line}: {message}")]
    EmbeddingParse { line: usize, message: String },

    #[error("precomputed scores: missing sentence {index} of response ({submission}, {review})")]
    MissingPrecomputedScore {
        submission: String,
        review: String,
        index: usize,
    },

    #[error("unlabeled review: no before-rebuttal scores")]
    UnlabeledReview,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("undefined similarity: zero vector")]
    ZeroVector,

    #[error(
        "incomplete review set: need at least 2 peer reviews with before-rebuttal scores, got {0}"
    )]
    IncompleteReviewSet(usize),

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("training diverged: non-finite loss")]
    Diverged,

    #[error("too few instances: {0}")]
    TooFewInstances(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
