use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the metric, I/O and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has norm <= 1e-12")]
    ZeroVector,
    #[error("vector component {index} is not finite")]
    NonFinite { index: usize },
    #[error("vector must have at least one component")]
    EmptyVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("attribute set is empty")]
    EmptyAttributeSet,
    #[error("target set is empty")]
    EmptyTargetSet,
    #[error("mean of normalized vectors has norm <= 1e-12 (vectors cancel)")]
    DegenerateMean,
    #[error("effect size undefined: association standard deviation is zero")]
    UndefinedEffectSize,
    #[error("permutation test requires |X| == |Y| (got {x} and {y})")]
    UnequalTargetSets { x: usize, y: usize },
    #[error("attribute means are identical (difference norm <= 1e-12)")]
    IdenticalAttributeMeans,
    #[error("strictness c must be > 0 (got {0})")]
    NonPositiveStrictness(f64),
    #[error("defining set {index} is degenerate (all members equal)")]
    DegenerateDefiningSet { index: usize },
    #[error("standard deviation <= 1e-15")]
    DegenerateStdDev,
    #[error("variance of {0} is zero")]
    DegenerateVariance(&'static str),
    #[error("subset robustness requires at least 4 words (got {0})")]
    SubsetTooSmall(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: line {line}: duplicate token {token:?}")]
    DuplicateToken {
        path: PathBuf,
        line: usize,
        token: String,
    },
    #[error("{0}: file is empty")]
    EmptyFile(PathBuf),
    #[error("refusing to write an empty embedding set")]
    EmptyEmbeddingSet,
    #[error("missing tokens: {}", .0.iter().map(|m| format!("{} (set {:?})", m.token, m.set)).collect::<Vec<_>>().join(", "))]
    MissingTokens(Vec<crate::embedding_io::MissingToken>),
    #[error("attribute set {0:?} is empty after dropping missing tokens")]
    AttributeSetEmptied(String),
    #[error("defining set {0:?} has fewer than 2 resolvable members")]
    DefiningSetTooSmall(String),
    #[error("unknown set {0:?}")]
    UnknownSet(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
