//! Regression graphs with arrows, dashed lines and full lines; their
//! pairwise Markov properties; separation; graphoid inference over
//! independence statements; and a Gaussian oracle for checking all of it
//! numerically.

pub mod cli;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod graph;
pub mod graphoid;
pub mod markov;
pub mod nodeset;
pub mod ordering;
pub mod random;
pub mod saturate;
pub mod separation;
pub mod statement;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeType, RegressionGraph, Violation};
pub use markov::{pairwise_statements, PairwiseMarkov, PairwiseProperty, PropertyRegistry};
pub use nodeset::{NodeId, NodeSet};
pub use ordering::{pair_sets, valid_ordering, ComponentOrdering, PairSets};
pub use separation::m_separated;
pub use statement::{IndependenceStatement, StatementSet};
