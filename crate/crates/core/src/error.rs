use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid artifact id {0:?}")]
    InvalidId(String),
    #[error("duplicate artifact id {0:?}")]
    DuplicateId(String),
    #[error("artifact {0:?} has no text")]
    EmptyArtifact(String),
    #[error("answer set references unknown artifact {0:?}")]
    DanglingAnswerId(String),
    #[error("duplicate link {0} -> {1}")]
    DuplicateLink(String, String),
    #[error("unknown source id {0:?}")]
    UnknownSourceId(String),
    #[error("corpus needs at least {needed} {what}, found {found}")]
    CorpusTooSmall {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no vector for id {0:?}")]
    MissingVectorForId(String),
    #[error("non-finite value in row {0:?}")]
    NonFinite(String),
    #[error("{0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("gold set is empty")]
    EmptyGoldSet,
    #[error("no source has a gold link")]
    NoEvaluableSources,
    #[error("need at least {needed} non-zero paired differences, found {found}")]
    TooFewPairs { needed: usize, found: usize },
    #[error("sample is empty")]
    EmptySample,
}
