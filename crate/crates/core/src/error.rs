use thiserror::Error;

/// Errors raised while building or querying a problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown variable id {0}")]
    UnknownVariableId(usize),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("domain of `{0}` repeats a value")]
    DuplicateValue(String),
    #[error("more than one cost table for `{0}`")]
    DuplicateCost(String),
    #[error("value `{value}` is not in the domain of `{var}`")]
    ValueNotInDomain { var: String, value: String },
    #[error("invalid cost {0}")]
    BadCost(String),
    #[error("invalid constraint: {0}")]
    BadConstraint(String),
    #[error("the inconsistent assignment cannot be applied")]
    Inconsistent,
    #[error("unsupported problem: {0}")]
    Unsupported(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed problem file: {0}")]
    Format(String),
}
