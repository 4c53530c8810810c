use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {elem} does not belong to group {ctx}")]
    ContextMismatch { elem: String, ctx: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("invalid partial action: {0}")]
    InvalidAction(Box<ValidationReport>),

    #[error("invalid twisted partial action: {0}")]
    InvalidTwist(Box<ValidationReport>),

    #[error("element is not supported in the required domain: {0}")]
    DomainViolation(String),

    #[error("subset is not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("inconsistent bundle data: {0}")]
    Inconsistent(String),

    #[error("objects belong to different bundles")]
    BundleMismatch,

    #[error("kernel support leaves the window: {0}")]
    OutsideWindow(String),

    #[error("fiber expectation violates the bimodule law: {0}")]
    BimoduleViolation(String),

    #[error("no pairwise disjoint translates found within radius {radius} (found {found} of {needed})")]
    SearchExhausted { radius: usize, found: usize, needed: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
