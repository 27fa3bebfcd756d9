use alloc::string::String;

use crate::pool::EntryId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("entry {0} does not exist")]
    NotFound(EntryId),
    #[error("entry {0} is already labeled")]
    AlreadyLabeled(EntryId),
    #[error("training data must contain at least two distinct classes")]
    DegenerateLabels,
    #[error("model has not been trained")]
    Untrained,
    #[error("empty input")]
    EmptyInput,
    #[error("no unlabeled entries left to query")]
    Exhausted,
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("strategy is bound to a different pool")]
    PoolMismatch,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("split error: {0}")]
    Split(String),
    #[error("seeding error: {0}")]
    Seeding(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("labeling session aborted: {0}")]
    Aborted(String),
}
