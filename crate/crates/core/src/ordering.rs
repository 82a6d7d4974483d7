//! Valid orderings of connected components, and the past of a node.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, RegressionGraph};
use crate::nodeset::{NodeId, NodeSet, MAX_NODE};

/// A valid ordering `g_1, ..., g_Q` of the connected components together
/// with a complete node ordering that refines it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentOrdering {
    components: Vec<NodeSet>,
    node_order: Vec<NodeId>,
    #[serde(skip)]
    component_index: Vec<usize>,
    #[serde(skip)]
    rank: Vec<usize>,
}

/// How ties between simultaneously available components are broken, and
/// the direction of the node order inside each component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Smallest contained node first; ascending ids inside components.
    #[default]
    Smallest,
    /// Largest contained node first; descending ids inside components.
    Largest,
}

impl ComponentOrdering {
    /// Checks an explicit component sequence against `g`. Each inner vector
    /// is one component listed in the desired node order.
    pub fn new(g: &RegressionGraph, sequence: Vec<Vec<NodeId>>) -> Result<Self> {
        let comps = g.undirected_components();
        let part = g.resolve_partition()?;
        let mut seen = NodeSet::EMPTY;
        let mut components = Vec::with_capacity(sequence.len());
        for block in &sequence {
            let set: NodeSet = block.iter().copied().collect();
            if set.len() != block.len() {
                return Err(Error::InvalidOrdering(format!("repeated node in {{{set}}}")));
            }
            if !comps.contains(&set) {
                return Err(Error::InvalidOrdering(format!("{{{set}}} is not a connected component")));
            }
            if !set.is_disjoint(seen) {
                return Err(Error::InvalidOrdering(format!("{{{set}}} listed twice")));
            }
            seen = seen.union(set);
            components.push(set);
        }
        if seen != g.nodes() {
            return Err(Error::InvalidOrdering(format!("nodes {} are missing", g.nodes().difference(seen))));
        }
        let ordering = Self::assemble(components, sequence.into_iter().flatten().collect());
        for e in g.edges() {
            if let Edge::Arrow { tail, head } = *e {
                if ordering.position(head) >= ordering.position(tail) {
                    return Err(Error::InvalidOrdering(format!(
                        "arrow {tail} -> {head} must point to an earlier component"
                    )));
                }
            }
        }
        let mut context_started = false;
        for c in &ordering.components {
            let is_context = c.is_subset(part.context);
            if context_started && !is_context {
                return Err(Error::InvalidOrdering(format!("response component {{{c}}} follows a context component")));
            }
            context_started |= is_context;
        }
        Ok(ordering)
    }

    fn assemble(components: Vec<NodeSet>, node_order: Vec<NodeId>) -> Self {
        let mut component_index = vec![usize::MAX; MAX_NODE as usize + 1];
        for (q, c) in components.iter().enumerate() {
            for n in *c {
                component_index[n.get() as usize] = q;
            }
        }
        let mut rank = vec![usize::MAX; MAX_NODE as usize + 1];
        for (r, n) in node_order.iter().enumerate() {
            rank[n.get() as usize] = r;
        }
        ComponentOrdering { components, node_order, component_index, rank }
    }

    pub fn components(&self) -> &[NodeSet] {
        &self.components
    }

    /// The complete valid ordering of all nodes.
    pub fn node_order(&self) -> &[NodeId] {
        &self.node_order
    }

    /// Position (0-based) of the component containing `n`.
    pub fn position(&self, n: NodeId) -> usize {
        self.component_index[n.get() as usize]
    }

    /// Position of `n` in the complete node ordering.
    pub fn rank(&self, n: NodeId) -> usize {
        self.rank[n.get() as usize]
    }

    pub fn covers(&self, n: NodeId) -> bool {
        self.position(n) != usize::MAX
    }

    pub fn component_of(&self, n: NodeId) -> NodeSet {
        self.components[self.position(n)]
    }

    /// `pst(i)`: all nodes in components ordered after the component of `i`.
    pub fn pst(&self, i: NodeId) -> Result<NodeSet> {
        if !self.covers(i) {
            return Err(Error::UnknownNode(i));
        }
        Ok(self.components[self.position(i) + 1..].iter().fold(NodeSet::EMPTY, |acc, c| acc.union(*c)))
    }

    /// Whether `a` precedes `b` in the complete node ordering.
    pub fn precedes(&self, a: NodeId, b: NodeId) -> bool {
        self.rank(a) < self.rank(b)
    }

    /// `sequence` form accepted by `new`.
    pub fn to_sequence(&self) -> Vec<Vec<NodeId>> {
        let mut out = Vec::with_capacity(self.components.len());
        let mut start = 0;
        for c in &self.components {
            out.push(self.node_order[start..start + c.len()].to_vec());
            start += c.len();
        }
        out
    }
}

/// The canonical valid ordering: smallest-node tie-break.
pub fn valid_ordering(g: &RegressionGraph) -> Result<ComponentOrdering> {
    valid_ordering_with(g, TieBreak::Smallest)
}

/// Topological order of the component graph with every response component
/// before every context component.
pub fn valid_ordering_with(g: &RegressionGraph, tie: TieBreak) -> Result<ComponentOrdering> {
    let comps = g.undirected_components();
    let part = g.resolve_partition()?;
    let k = comps.len();
    let comp_of = |n: NodeId| comps.iter().position(|c| c.contains(n)).unwrap();

    // must_precede[p]: components that have to be placed before p, namely
    // those that p's arrows point into.
    let mut must_precede = vec![Vec::new(); k];
    for e in g.edges() {
        if let Edge::Arrow { tail, head } = *e {
            let (p, q) = (comp_of(tail), comp_of(head));
            if p == q {
                return Err(Error::ComponentCycle(vec![comps[p]]));
            }
            if !must_precede[p].contains(&q) {
                must_precede[p].push(q);
            }
        }
    }
    let is_context: Vec<bool> = comps.iter().map(|c| c.is_subset(part.context)).collect();

    let mut placed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let available = |p: usize| !placed[p] && must_precede[p].iter().all(|&q| placed[q]);
        let responses_left = (0..k).any(|p| !placed[p] && !is_context[p]);
        let candidates = (0..k).filter(|&p| available(p) && (!responses_left || !is_context[p]));
        let pick = match tie {
            TieBreak::Smallest => candidates.min_by_key(|&p| comps[p].first()),
            TieBreak::Largest => candidates.max_by_key(|&p| comps[p].iter().last()),
        };
        let Some(p) = pick else {
            let rest = (0..k).filter(|&p| !placed[p]).map(|p| comps[p]).collect();
            return Err(Error::ComponentCycle(rest));
        };
        placed[p] = true;
        order.push(comps[p]);
    }
    let node_order = order
        .iter()
        .flat_map(|c| {
            let mut v = c.to_vec();
            if tie == TieBreak::Largest {
                v.reverse();
            }
            v
        })
        .collect();
    Ok(ComponentOrdering::assemble(order, node_order))
}

/// Every valid ordering of the components (ascending node order inside
/// each), up to `limit` orderings.
pub fn enumerate_orderings(g: &RegressionGraph, limit: usize) -> Result<Vec<ComponentOrdering>> {
    let comps = g.undirected_components();
    let part = g.resolve_partition()?;
    let k = comps.len();
    let comp_of = |n: NodeId| comps.iter().position(|c| c.contains(n)).unwrap();
    let mut must_precede_ix = vec![Vec::new(); k];
    for e in g.edges() {
        if let Edge::Arrow { tail, head } = *e {
            must_precede_ix[comp_of(tail)].push(comp_of(head));
        }
    }
    let is_context: Vec<bool> = comps.iter().map(|c| c.is_subset(part.context)).collect();

    struct Search<'a> {
        comps: &'a [NodeSet],
        must: &'a [Vec<usize>],
        is_context: &'a [bool],
        placed: Vec<bool>,
        order: Vec<usize>,
        out: Vec<Vec<usize>>,
        limit: usize,
    }
    impl Search<'_> {
        fn run(&mut self) {
            if self.out.len() >= self.limit {
                return;
            }
            let k = self.comps.len();
            if self.order.len() == k {
                self.out.push(self.order.clone());
                return;
            }
            let responses_left = (0..k).any(|p| !self.placed[p] && !self.is_context[p]);
            for p in 0..k {
                let ok = !self.placed[p]
                    && self.must[p].iter().all(|&q| self.placed[q])
                    && (!responses_left || !self.is_context[p]);
                if ok {
                    self.placed[p] = true;
                    self.order.push(p);
                    self.run();
                    self.order.pop();
                    self.placed[p] = false;
                }
            }
        }
    }
    let mut s = Search {
        comps: &comps,
        must: &must_precede_ix,
        is_context: &is_context,
        placed: vec![false; k],
        order: Vec::new(),
        out: Vec::new(),
        limit,
    };
    s.run();
    Ok(s.out
        .into_iter()
        .map(|idx| {
            let order: Vec<NodeSet> = idx.iter().map(|&p| comps[p]).collect();
            let nodes = order.iter().flat_map(|c| c.iter()).collect();
            ComponentOrdering::assemble(order, nodes)
        })
        .collect())
}

/// The three conditioning sets of a node pair, each with the pair removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairSets {
    pub par: NodeSet,
    pub ant: NodeSet,
    pub pst: NodeSet,
}

pub fn pair_sets(g: &RegressionGraph, ordering: &ComponentOrdering, i: NodeId, j: NodeId) -> Result<PairSets> {
    g.check_node(i)?;
    g.check_node(j)?;
    if !ordering.covers(i) {
        return Err(Error::UnknownNode(i));
    }
    if !ordering.covers(j) {
        return Err(Error::UnknownNode(j));
    }
    let pair = NodeSet::singleton(i).with(j);
    let par = g.parents_of(i).union(g.parents_of(j)).difference(pair);
    let ant = g.anteriors_of(i).union(g.anteriors_of(j)).difference(pair);
    let (pi, pj) = (ordering.pst(i)?, ordering.pst(j)?);
    let pst = pi.union(pj).difference(pair);
    let (lo, hi_past) = if ordering.precedes(i, j) { (pi, j) } else { (pj, i) };
    debug_assert_eq!(pst, lo.without(hi_past));
    Ok(PairSets { par, ant, pst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId::new(i).unwrap()
    }

    #[test]
    fn forced_ordering() {
        let g =
            RegressionGraph::from_edges([Edge::dashed(n(1), n(2)), Edge::arrow(n(3), n(1)), Edge::full(n(3), n(4))])
                .unwrap();
        let o = valid_ordering(&g).unwrap();
        assert_eq!(o.components(), &[NodeSet::of(&[1, 2]), NodeSet::of(&[3, 4])]);
        assert_eq!(o.pst(n(1)).unwrap(), NodeSet::of(&[3, 4]));
        assert_eq!(o.pst(n(3)).unwrap(), NodeSet::EMPTY);
        assert_eq!(enumerate_orderings(&g, 10).unwrap().len(), 1);
    }

    #[test]
    fn explicit_ordering_checked() {
        let g = RegressionGraph::from_edges([Edge::arrow(n(2), n(1)), Edge::dashed(n(3), n(4))]).unwrap();
        // node 2 is context and must come last
        assert!(ComponentOrdering::new(&g, vec![vec![n(2)], vec![n(1)], vec![n(3), n(4)]]).is_err());
        assert!(ComponentOrdering::new(&g, vec![vec![n(3), n(4)], vec![n(2)], vec![n(1)]]).is_err());
        let o = ComponentOrdering::new(&g, vec![vec![n(4), n(3)], vec![n(1)], vec![n(2)]]).unwrap();
        assert!(o.precedes(n(4), n(3)));
        assert_eq!(o.to_sequence(), vec![vec![n(4), n(3)], vec![n(1)], vec![n(2)]]);
        assert!(ComponentOrdering::new(&g, vec![vec![n(3)], vec![n(4)], vec![n(1)], vec![n(2)]]).is_err());
        assert!(ComponentOrdering::new(&g, vec![vec![n(3), n(4)], vec![n(1)]]).is_err());
    }

    #[test]
    fn tie_breaks_differ() {
        let g = RegressionGraph::new(
            NodeSet::EMPTY,
            [Edge::dashed(n(1), n(2)), Edge::dashed(n(3), n(4))],
            None,
            NodeSet::EMPTY,
        )
        .unwrap();
        let a = valid_ordering_with(&g, TieBreak::Smallest).unwrap();
        let b = valid_ordering_with(&g, TieBreak::Largest).unwrap();
        assert_eq!(a.node_order(), &[n(1), n(2), n(3), n(4)]);
        assert_eq!(b.node_order(), &[n(4), n(3), n(2), n(1)]);
        assert_eq!(enumerate_orderings(&g, 10).unwrap().len(), 2);
    }

    #[test]
    fn same_component_pair_sets() {
        let g = RegressionGraph::from_edges([Edge::dashed(n(1), n(2)), Edge::dashed(n(2), n(3))]).unwrap();
        let o = valid_ordering(&g).unwrap();
        let s = pair_sets(&g, &o, n(1), n(3)).unwrap();
        assert_eq!(s, PairSets { par: NodeSet::EMPTY, ant: NodeSet::EMPTY, pst: NodeSet::EMPTY });
    }
}
