use thiserror::Error;

/// Failure while reading a rules file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected `lhs -> rhs`")]
    MissingArrow,
    #[error("rule has an empty left-hand side")]
    EmptyLhs,
    #[error("unexpected whitespace inside `{0}`")]
    Whitespace(String),
    #[error("duplicate rule id `{0}`")]
    DuplicateId(String),
    #[error("malformed directive: {0}")]
    Directive(String),
    #[error("invalid rule set: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(String),
    #[error("rule `{rule}` names `{target}` as its inverse, but {reason}")]
    BadInverse {
        rule: String,
        target: String,
        reason: &'static str,
    },
    #[error("rule `{0}` has an empty right-hand side and cannot be inverted")]
    EmptyRhsInverse(String),
    #[error("rule `{rule}` does not match `{subject}` at position {position}")]
    InvalidSite {
        rule: String,
        subject: String,
        position: usize,
    },
    #[error("no initial states given")]
    NoInitialStates,
    #[error("node budget of {limit} exceeded after {} generations (layer sizes {layer_sizes:?}, {edges} edges)", layer_sizes.len().saturating_sub(1))]
    NodeBudgetExceeded {
        limit: usize,
        layer_sizes: Vec<usize>,
        edges: usize,
    },
    #[error("path budget of {limit} exceeded")]
    PathBudgetExceeded { limit: usize },
    #[error("cell budget of {limit} exceeded while enumerating {dimension}-cells")]
    CellBudgetExceeded { limit: usize, dimension: usize },
    #[error("state `{0}` is not a vertex of the graph")]
    UnknownState(String),
    #[error("paths do not share endpoints")]
    EndpointMismatch,
    #[error("paths have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("homotopy order must be at least 2, got {0}")]
    OrderTooLow(u32),
    #[error("cannot add order-{order} rungs: highest order present is {max_order}")]
    OrderGap { order: u32, max_order: u32 },
    #[error("requested {requested}-fold check but highest order present is {max_order}")]
    OrderExceedsSystem { requested: u32, max_order: u32 },
    #[error("malformed graph document: {0}")]
    Graph(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
