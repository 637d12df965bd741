use crate::datagraph::NodeId;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge alphabets differ")]
    AlphabetMismatch,
    #[error("unknown edge label `{0}`")]
    UnknownLabel(String),
    #[error("edge endpoint {0} is not a node of the graph")]
    DanglingEndpoint(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("node {0} does not exist")]
    MissingNode(NodeId),
    #[error("data values must be non-empty strings")]
    EmptyDataValue,
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("repetition bounds {{{n},{m}}} have n > m")]
    InvalidRepeat { n: u32, m: u32 },
    #[error("expression outside the required fragment: {0}")]
    Fragment(String),
    #[error("enumeration budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: String,
        needed: String,
        limit: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no candidate graph has positive weight")]
    NoCandidate,
    #[error("no feasible solution: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn budget(what: impl Into<String>, needed: impl ToString, limit: impl ToString) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }
}
