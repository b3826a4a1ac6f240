use thiserror::Error;

/// Problems with instance or allocation documents.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("missing or mistyped field `{0}`")]
    Field(&'static str),
    #[error("not an exact number: {0}")]
    BadNumber(String),
    #[error("negative value {value} for agent {agent}, good {good}")]
    NegativeValue {
        agent: usize,
        good: String,
        value: String,
    },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("expected {expected} value rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("duplicate good identifier `{0}`")]
    DuplicateGood(String),
    #[error("unknown good identifier `{0}`")]
    UnknownGood(String),
    #[error("good `{0}` appears more than once in the allocation")]
    OverlappingBundles(String),
    #[error("allocation has {found} bundles but the instance has {expected} agents")]
    BundleCount { expected: usize, found: usize },
    #[error("bad polynomial degree `{0}`")]
    BadDegree(String),
}

/// A caller broke an operation's precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("contract violation: {0}")]
pub struct ContractError(pub String);

impl ContractError {
    pub(crate) fn new(msg: impl Into<String>) -> Self {
        ContractError(msg.into())
    }
}
