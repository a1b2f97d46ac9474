use thiserror::Error;

/// A model, context, query or control annotation is malformed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("no equation for endogenous variable `{0}`")]
    MissingEquation(String),
    #[error("equation given for `{0}`, which is not an endogenous variable")]
    UnexpectedEquation(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("range of `{0}` is empty")]
    EmptyRange(String),
    #[error("range of `{variable}` lists `{value}` twice")]
    DuplicateValue { variable: String, value: String },
    #[error("value `{value}` is not in the range of `{variable}`")]
    RangeMismatch { variable: String, value: String },
    #[error("in the equation of `{variable}`: {detail}")]
    KindMismatch { variable: String, detail: String },
    #[error("cyclic dependency among {}", .0.join(", "))]
    CyclicDependency(Vec<String>),
    #[error("control variable `{0}` must have range {{top, bot}}")]
    NonBooleanControlRange(String),
    #[error("variable `{0}` is intervened on more than once")]
    DuplicateIntervention(String),
    #[error("variable `{0}` is both fixed and swept")]
    OverlappingSweep(String),
    #[error("context does not set exogenous variable `{0}`")]
    MissingContextValue(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("unknown query `{0}`")]
    UnknownQuery(String),
    #[error("variable set of {0} elements exceeds the 64-element universe limit")]
    UniverseTooLarge(usize),
}

/// Failures of the enumeration engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("search space of {size} points for {what} exceeds the limit of {limit}")]
    SearchSpaceExceeded { what: String, size: u128, limit: u64 },
    #[error("the formula does not hold in the actual situation")]
    NoOccurrence,
    #[error("the formula is not a single primitive event")]
    NotPrimitive,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}
