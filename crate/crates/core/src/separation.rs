//! Path separation for regression graphs.
//!
//! An inner node of a path is a collider when both incident path edges have
//! an arrowhead at it (an arrow pointing to it or a dashed line). A collider
//! is open when it lies in `C ∪ ant(C)`; any other inner node is open when it
//! is outside `C`. `A` and `B` are separated given `C` when no path between
//! them has all inner nodes open.
//!
//! The search runs over (node, arrowhead-on-entry) states, so each node is
//! expanded at most twice.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::Result;
use crate::graph::RegressionGraph;
use crate::markov::pairwise_statements;
use crate::markov::PairwiseMarkov;
use crate::nodeset::{NodeId, NodeSet};
use crate::ordering::ComponentOrdering;
use crate::statement::{check, IndependenceStatement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub separated: bool,
    /// A connecting path from a node of `A` to a node of `B`, when one
    /// exists.
    pub witness: Option<Vec<NodeId>>,
}

/// Steps the simple-path fallback may take while turning a connecting walk
/// into a connecting path.
const WITNESS_SEARCH_LIMIT: usize = 1_000_000;

pub fn m_separated(g: &RegressionGraph, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<Separation> {
    check(a, b, c)?;
    g.check_nodes(a.union(b).union(c))?;
    let opening = c.union(g.ant_of_set(c));

    // state index: node id * 2 + (arrowhead at node on entry)
    let mut prev: [Option<(NodeId, bool)>; 2 * 65 + 2] = [None; 2 * 65 + 2];
    let mut seen = [false; 2 * 65 + 2];
    let slot = |n: NodeId, head: bool| n.get() as usize * 2 + head as usize;
    let mut queue = VecDeque::new();

    for start in a {
        for e in g.incident(start) {
            let next = e.other(start).unwrap();
            let head = e.has_head_at(next);
            let s = slot(next, head);
            if !seen[s] {
                seen[s] = true;
                prev[s] = Some((start, false));
                queue.push_back((next, head));
            }
        }
    }

    while let Some((node, head_in)) = queue.pop_front() {
        if b.contains(node) {
            let walk = rebuild(&prev, node, head_in, a, slot);
            let witness =
                if is_simple(&walk) { walk } else { simple_connecting_path(g, a, b, c, opening).unwrap_or(walk) };
            return Ok(Separation { separated: false, witness: Some(witness) });
        }
        if a.contains(node) {
            // a path through another node of A has a connecting suffix
            continue;
        }
        for e in g.incident(node) {
            let next = e.other(node).unwrap();
            let collider = head_in && e.has_head_at(node);
            let open = if collider { opening.contains(node) } else { !c.contains(node) };
            if !open {
                continue;
            }
            let head = e.has_head_at(next);
            let s = slot(next, head);
            if !seen[s] {
                seen[s] = true;
                prev[s] = Some((node, head_in));
                queue.push_back((next, head));
            }
        }
    }
    Ok(Separation { separated: true, witness: None })
}

/// Follows predecessor links back to a start node. Nodes of `A` are never
/// expanded, so the first one met is where the walk began.
fn rebuild(
    prev: &[Option<(NodeId, bool)>],
    end: NodeId,
    head: bool,
    a: NodeSet,
    slot: impl Fn(NodeId, bool) -> usize,
) -> Vec<NodeId> {
    let mut walk = vec![end];
    let (mut node, mut h) = (end, head);
    loop {
        let (p, ph) = prev[slot(node, h)].expect("visited state has a predecessor");
        walk.push(p);
        if a.contains(p) {
            break;
        }
        node = p;
        h = ph;
    }
    walk.reverse();
    walk
}

fn is_simple(walk: &[NodeId]) -> bool {
    let mut seen = NodeSet::EMPTY;
    walk.iter().all(|&n| {
        let fresh = !seen.contains(n);
        seen.insert(n);
        fresh
    })
}

/// Depth-first search over simple paths, used only to produce a witness.
fn simple_connecting_path(
    g: &RegressionGraph,
    a: NodeSet,
    b: NodeSet,
    c: NodeSet,
    opening: NodeSet,
) -> Option<Vec<NodeId>> {
    let mut budget = WITNESS_SEARCH_LIMIT;
    for start in a {
        let mut path = vec![start];
        if dfs(g, b, c, opening, &mut path, false, &mut budget) {
            return Some(path);
        }
    }
    None
}

fn dfs(
    g: &RegressionGraph,
    b: NodeSet,
    c: NodeSet,
    opening: NodeSet,
    path: &mut Vec<NodeId>,
    head_in: bool,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let node = *path.last().unwrap();
    let on_path: NodeSet = path.iter().copied().collect();
    for e in g.incident(node) {
        let next = e.other(node).unwrap();
        if on_path.contains(next) {
            continue;
        }
        if path.len() > 1 {
            let collider = head_in && e.has_head_at(node);
            let open = if collider { opening.contains(node) } else { !c.contains(node) };
            if !open {
                continue;
            }
        }
        path.push(next);
        if b.contains(next) || dfs(g, b, c, opening, path, e.has_head_at(next), budget) {
            return true;
        }
        path.pop();
    }
    false
}

/// Renders a path with its edge symbols, e.g. `2 <- 5 ~~ 7`.
pub fn format_path(g: &RegressionGraph, path: &[NodeId]) -> String {
    let mut out = path.first().map(|n| n.to_string()).unwrap_or_default();
    for w in path.windows(2) {
        let (x, y) = (w[0], w[1]);
        let sym = match g.edge_between(x, y) {
            Some(crate::graph::Edge::Arrow { tail, .. }) if tail == x => "->",
            Some(crate::graph::Edge::Arrow { .. }) => "<-",
            Some(crate::graph::Edge::Dashed(..)) => "~~",
            Some(crate::graph::Edge::Full(..)) => "--",
            None => "??",
        };
        out.push_str(&format!(" {sym} {y}"));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessFailure {
    #[serde(rename = "A")]
    pub a: NodeSet,
    #[serde(rename = "B")]
    pub b: NodeSet,
    #[serde(rename = "C")]
    pub c: NodeSet,
    pub witness: Vec<NodeId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    pub property: String,
    pub total: usize,
    pub failures: Vec<SoundnessFailure>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every statement in `statements` by separation.
pub fn check_statements<'a>(
    g: &RegressionGraph,
    label: &str,
    statements: impl IntoIterator<Item = &'a IndependenceStatement>,
) -> Result<SoundnessReport> {
    let mut total = 0;
    let mut failures = Vec::new();
    for s in statements {
        total += 1;
        let r = m_separated(g, s.a(), s.b(), s.c())?;
        if !r.separated {
            failures.push(SoundnessFailure { a: s.a(), b: s.b(), c: s.c(), witness: r.witness.unwrap_or_default() });
        }
    }
    Ok(SoundnessReport { property: label.to_string(), total, failures })
}

/// Every statement a pairwise property emits must be a separation.
pub fn verify_soundness(
    g: &RegressionGraph,
    ordering: &ComponentOrdering,
    property: &dyn PairwiseMarkov,
) -> Result<SoundnessReport> {
    let stmts = pairwise_statements(g, ordering, property)?;
    check_statements(g, property.name(), &stmts)
}
