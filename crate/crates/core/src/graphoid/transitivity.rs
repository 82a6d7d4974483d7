use serde::Serialize;

use crate::nodeset::{NodeId, NodeSet};
use crate::statement::{IndependenceStatement, StatementSet};

/// `j ⫫ k | c` and `j ⫫ k | c ∪ {i}` are in the set but neither
/// `i ⫫ j | c` nor `i ⫫ k | c` is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityViolation {
    pub i: NodeId,
    pub j: NodeId,
    pub k: NodeId,
    pub c: NodeSet,
}

/// Singleton transitivity has a disjunctive conclusion, so it is checked
/// against a given set rather than used as a closure rule.
pub fn check_singleton_transitivity(statements: &StatementSet, universe: NodeSet) -> Vec<TransitivityViolation> {
    let has = |x: NodeId, y: NodeId, c: NodeSet| {
        statements.contains(&IndependenceStatement::new_unchecked(NodeSet::singleton(x), NodeSet::singleton(y), c))
    };
    let mut out = Vec::new();
    for s in statements.iter().filter(|s| s.is_pairwise()) {
        let (j, k, c) = (s.a().first().unwrap(), s.b().first().unwrap(), s.c());
        for i in universe.difference(s.nodes()) {
            if has(j, k, c.with(i)) && !has(i, j, c) && !has(i, k, c) {
                out.push(TransitivityViolation { i, j, k, c });
            }
        }
    }
    out
}
