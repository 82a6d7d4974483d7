use thiserror::Error;

use crate::nodeset::{NodeId, NodeSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: duplicate edge for pair {a},{b}")]
    DuplicateEdge { line: usize, a: NodeId, b: NodeId },

    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),

    #[error("invalid graph JSON: {0}")]
    Json(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown nodes {0}")]
    UnknownNodes(NodeSet),

    #[error("sets are not disjoint: {0} | {1} | {2}")]
    NotDisjoint(NodeSet, NodeSet, NodeSet),

    #[error("both sides of an independence statement must be nonempty")]
    EmptySide,

    #[error("node {node} is declared {declared} but {reason}")]
    PartitionConflict { node: NodeId, declared: &'static str, reason: &'static str },

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("components form a cycle: {0:?}")]
    ComponentCycle(Vec<NodeSet>),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
