use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {src}->{dst} is a self-loop")]
    SelfLoop { src: usize, dst: usize },

    #[error("duplicate edge {src}->{dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("edge id {edge} out of range ({m} edges)")]
    EdgeOutOfRange { edge: usize, m: usize },

    #[error("invalid topological order: {0}")]
    InvalidTopoOrder(String),

    #[error("graph has no topological order attached")]
    MissingTopoOrder,

    #[error("graph contains a directed cycle")]
    Cyclic,

    #[error("weight function: {0}")]
    InvalidWeights(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("computation budget of {budget} configurations exceeded")]
    BudgetExceeded { budget: usize },

    /// A construction's own promise or postcondition did not hold.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

impl Error {
    /// Contract violations map to CLI exit code 1; everything else is an input problem.
    pub fn is_contract_violation(&self) -> bool {
        matches!(self, Error::ContractViolation(_))
    }
}
