use thiserror::Error;

use crate::symbol::CellId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse symbol {input:?}: {message}")]
    Symbol { input: String, message: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: variable {var} is not bound by any consumed or promoter pattern")]
    UnboundVariable { rule: String, var: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("self-loop on cell {0}")]
    SelfLoop(CellId),
    #[error("arc ({0}, {1}) mentions an unknown cell")]
    UnknownEndpoint(CellId, CellId),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(CellId, CellId),
    #[error("general {0} is not a node of the digraph")]
    UnknownGeneral(CellId),
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulationError {
    #[error("step budget must be positive")]
    ZeroBudget,
    #[error("configuration cells do not match the digraph nodes")]
    CellMismatch,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: step index {step} does not increase")]
    NotIncreasing { line: usize, step: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
