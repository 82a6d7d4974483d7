//! Completion of a regression graph under a fixed valid ordering.

use crate::error::Result;
use crate::graph::{Edge, RegressionGraph};
use crate::ordering::ComponentOrdering;

/// Adds every missing edge while keeping the node ordering valid: full
/// lines inside the context set, dashed lines inside each response
/// component, and for every remaining pair an arrow pointing to the
/// earlier node from the later one.
///
/// Context components merge into one complete component; the response
/// components and their order are unchanged.
pub fn saturate(g: &RegressionGraph, ordering: &ComponentOrdering) -> Result<RegressionGraph> {
    let part = g.resolve_partition()?;
    let mut edges: Vec<Edge> = g.edges().to_vec();
    for (a, b) in g.uncoupled_pairs() {
        let edge = if part.context.contains(a) && part.context.contains(b) {
            Edge::full(a, b)
        } else if ordering.position(a) == ordering.position(b) {
            Edge::dashed(a, b)
        } else if ordering.precedes(a, b) {
            Edge::arrow(b, a)
        } else {
            Edge::arrow(a, b)
        };
        edges.push(edge);
    }
    RegressionGraph::new(g.nodes(), edges, g.context_decl(), g.response_decl())
}
