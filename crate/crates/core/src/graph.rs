//! Regression graphs: three edge types, structural validation, connected
//! components and the response/context partition.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet, MAX_NODE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Arrow,
    Dashed,
    Full,
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeType::Arrow => "arrow",
            EdgeType::Dashed => "dashed",
            EdgeType::Full => "full",
        })
    }
}

/// An edge. Undirected kinds keep `a < b`; use the constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    /// Arrow pointing to `head` from `tail`; `tail` is a parent of `head`.
    Arrow {
        tail: NodeId,
        head: NodeId,
    },
    Dashed(NodeId, NodeId),
    Full(NodeId, NodeId),
}

impl Edge {
    pub fn arrow(tail: NodeId, head: NodeId) -> Edge {
        Edge::Arrow { tail, head }
    }

    pub fn dashed(a: NodeId, b: NodeId) -> Edge {
        Edge::Dashed(a.min(b), a.max(b))
    }

    pub fn full(a: NodeId, b: NodeId) -> Edge {
        Edge::Full(a.min(b), a.max(b))
    }

    pub fn of_type(kind: EdgeType, a: NodeId, b: NodeId) -> Edge {
        match kind {
            EdgeType::Arrow => Edge::arrow(a, b),
            EdgeType::Dashed => Edge::dashed(a, b),
            EdgeType::Full => Edge::full(a, b),
        }
    }

    pub fn kind(&self) -> EdgeType {
        match self {
            Edge::Arrow { .. } => EdgeType::Arrow,
            Edge::Dashed(..) => EdgeType::Dashed,
            Edge::Full(..) => EdgeType::Full,
        }
    }

    /// `(tail, head)` for arrows, `(min, max)` otherwise.
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        match *self {
            Edge::Arrow { tail, head } => (tail, head),
            Edge::Dashed(a, b) | Edge::Full(a, b) => (a, b),
        }
    }

    pub fn pair(&self) -> (NodeId, NodeId) {
        let (a, b) = self.endpoints();
        (a.min(b), a.max(b))
    }

    pub fn other(&self, n: NodeId) -> Option<NodeId> {
        let (a, b) = self.endpoints();
        if a == n {
            Some(b)
        } else if b == n {
            Some(a)
        } else {
            None
        }
    }

    /// Whether the edge carries an arrowhead at `n`. Dashed lines have
    /// arrowheads at both ends, full lines at neither.
    pub fn has_head_at(&self, n: NodeId) -> bool {
        match *self {
            Edge::Arrow { head, .. } => head == n,
            Edge::Dashed(a, b) => a == n || b == n,
            Edge::Full(..) => false,
        }
    }

    pub(crate) fn sort_key(&self) -> (EdgeType, NodeId, NodeId) {
        let (a, b) = self.endpoints();
        (self.kind(), a, b)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge::Arrow { tail, head } => write!(f, "{tail} -> {head}"),
            Edge::Dashed(a, b) => write!(f, "{a} ~~ {b}"),
            Edge::Full(a, b) => write!(f, "{a} -- {b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Dashed,
    Full,
    Singleton,
    /// Both dashed and full lines; never present in a valid graph.
    Mixed,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Dashed => "dashed",
            ComponentKind::Full => "full",
            ComponentKind::Singleton => "singleton",
            ComponentKind::Mixed => "mixed",
        })
    }
}

/// A connected component of the graph after all arrows are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub nodes: NodeSet,
    pub kind: ComponentKind,
    pub context: bool,
}

/// The response set `u` and context set `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub response: NodeSet,
    pub context: NodeSet,
}

/// A structural constraint a regression graph breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    MultipleEdges { a: NodeId, b: NodeId },
    FullAndDashedAtNode { node: NodeId },
    ArrowIntoFullLineNode { tail: NodeId, head: NodeId },
    MixedComponent { nodes: NodeSet },
    ArrowInsideComponent { tail: NodeId, head: NodeId },
    ComponentCycle { components: Vec<NodeSet> },
    FullLineOutsideContext { node: NodeId },
    ContextWithDashed { node: NodeId },
    ContextWithIncomingArrow { node: NodeId },
    ResponseWithFullLine { node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MultipleEdges { a, b } => write!(f, "more than one edge between {a} and {b}"),
            Violation::FullAndDashedAtNode { node } => {
                write!(f, "node {node} has both a full line and a dashed line")
            }
            Violation::ArrowIntoFullLineNode { tail, head } => {
                write!(f, "arrow points to a full-line node: {tail} -> {head}")
            }
            Violation::MixedComponent { nodes } => {
                write!(f, "component {{{nodes}}} mixes dashed and full lines")
            }
            Violation::ArrowInsideComponent { tail, head } => {
                write!(f, "arrow inside one component: {tail} -> {head}")
            }
            Violation::ComponentCycle { components } => {
                write!(f, "components form a directed cycle:")?;
                for c in components {
                    write!(f, " {{{c}}}")?;
                }
                Ok(())
            }
            Violation::FullLineOutsideContext { node } => {
                write!(f, "full-line node {node} is not declared context")
            }
            Violation::ContextWithDashed { node } => {
                write!(f, "context node {node} has a dashed line")
            }
            Violation::ContextWithIncomingArrow { node } => {
                write!(f, "context node {node} has an incoming arrow")
            }
            Violation::ResponseWithFullLine { node } => {
                write!(f, "response node {node} has a full line")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegressionGraph {
    nodes: NodeSet,
    edges: Vec<Edge>,
    context_decl: Option<NodeSet>,
    response_decl: NodeSet,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    dashed: Vec<NodeSet>,
    full: Vec<NodeSet>,
}

const SLOTS: usize = MAX_NODE as usize + 1;

impl RegressionGraph {
    /// Builds a graph. Edge endpoints are added to the node set. Duplicate
    /// pairs are kept so that `validate` can report them.
    pub fn new(
        nodes: NodeSet,
        edges: impl IntoIterator<Item = Edge>,
        context_decl: Option<NodeSet>,
        response_decl: NodeSet,
    ) -> Result<Self> {
        let mut nodes = nodes;
        let context_decl = context_decl.filter(|c| !c.is_empty());
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            let (a, b) = e.endpoints();
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            nodes.insert(a);
            nodes.insert(b);
        }
        let decl = context_decl.unwrap_or_default().union(response_decl);
        if !decl.is_subset(nodes) {
            return Err(Error::UnknownNodes(decl.difference(nodes)));
        }
        if let Some(n) = context_decl.unwrap_or_default().intersection(response_decl).first() {
            return Err(Error::PartitionConflict { node: n, declared: "context", reason: "is also declared response" });
        }
        edges.sort_by_key(Edge::sort_key);
        edges.dedup();

        let mut parents = vec![NodeSet::EMPTY; SLOTS];
        let mut children = vec![NodeSet::EMPTY; SLOTS];
        let mut dashed = vec![NodeSet::EMPTY; SLOTS];
        let mut full = vec![NodeSet::EMPTY; SLOTS];
        for e in &edges {
            match *e {
                Edge::Arrow { tail, head } => {
                    parents[ix(head)].insert(tail);
                    children[ix(tail)].insert(head);
                }
                Edge::Dashed(a, b) => {
                    dashed[ix(a)].insert(b);
                    dashed[ix(b)].insert(a);
                }
                Edge::Full(a, b) => {
                    full[ix(a)].insert(b);
                    full[ix(b)].insert(a);
                }
            }
        }
        Ok(RegressionGraph { nodes, edges, context_decl, response_decl, parents, children, dashed, full })
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::new(NodeSet::EMPTY, edges, None, NodeSet::EMPTY)
    }

    pub fn nodes(&self) -> NodeSet {
        self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edges in canonical order: by kind, then endpoints.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn context_decl(&self) -> Option<NodeSet> {
        self.context_decl
    }

    pub fn response_decl(&self) -> NodeSet {
        self.response_decl
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn check_node(&self, n: NodeId) -> Result<()> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(Error::UnknownNode(n))
        }
    }

    pub fn check_nodes(&self, s: NodeSet) -> Result<()> {
        let unknown = s.difference(self.nodes);
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::UnknownNodes(unknown))
        }
    }

    pub fn parents_of(&self, n: NodeId) -> NodeSet {
        self.parents[ix(n)]
    }

    pub fn children_of(&self, n: NodeId) -> NodeSet {
        self.children[ix(n)]
    }

    pub fn dashed_neighbors(&self, n: NodeId) -> NodeSet {
        self.dashed[ix(n)]
    }

    pub fn full_neighbors(&self, n: NodeId) -> NodeSet {
        self.full[ix(n)]
    }

    pub fn neighbors(&self, n: NodeId) -> NodeSet {
        self.parents_of(n).union(self.children_of(n)).union(self.dashed_neighbors(n)).union(self.full_neighbors(n))
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).contains(b)
    }

    /// Edges incident to `n`, in canonical order.
    pub fn incident(&self, n: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.other(n).is_some())
    }

    pub fn edge_between(&self, a: NodeId, b: NodeId) -> Option<Edge> {
        self.edges.iter().find(|e| e.other(a) == Some(b)).copied()
    }

    /// Unordered node pairs not joined by any edge.
    pub fn uncoupled_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let nodes = self.nodes.to_vec();
        let mut out = Vec::new();
        for (k, &a) in nodes.iter().enumerate() {
            for &b in &nodes[k + 1..] {
                if !self.adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.uncoupled_pairs().is_empty()
    }

    /// `par(i)`: tails of arrows pointing to `i`.
    pub fn par(&self, i: NodeId) -> Result<NodeSet> {
        self.check_node(i)?;
        Ok(self.parents_of(i))
    }

    /// `ant(i)`: nodes with an anterior path to `i`, that is, arrows all
    /// pointing towards `i` followed by full lines. Never contains `i`.
    pub fn ant(&self, i: NodeId) -> Result<NodeSet> {
        self.check_node(i)?;
        Ok(self.anteriors_of(i))
    }

    pub(crate) fn anteriors_of(&self, i: NodeId) -> NodeSet {
        let mut ancestors = NodeSet::EMPTY;
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            for p in self.parents_of(x).difference(ancestors).without(i) {
                ancestors.insert(p);
                stack.push(p);
            }
        }
        let mut reached = ancestors.with(i);
        let mut stack: Vec<NodeId> = reached.to_vec();
        while let Some(x) = stack.pop() {
            for y in self.full_neighbors(x).difference(reached) {
                reached.insert(y);
                stack.push(y);
            }
        }
        reached.without(i)
    }

    /// Anteriors of a set: the union of `ant(c)` over `c` in the set.
    pub fn ant_of_set(&self, s: NodeSet) -> NodeSet {
        s.iter().fold(NodeSet::EMPTY, |acc, c| acc.union(self.anteriors_of(c)))
    }

    /// Node sets of the connected components after removing all arrows,
    /// sorted by smallest member.
    pub(crate) fn undirected_components(&self) -> Vec<NodeSet> {
        let mut seen = NodeSet::EMPTY;
        let mut out = Vec::new();
        for start in self.nodes {
            if seen.contains(start) {
                continue;
            }
            let mut comp = NodeSet::singleton(start);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                let next = self.dashed_neighbors(x).union(self.full_neighbors(x)).difference(comp);
                for y in next {
                    comp.insert(y);
                    stack.push(y);
                }
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    fn component_kind(&self, comp: NodeSet) -> ComponentKind {
        let has_dashed = comp.iter().any(|n| !self.dashed_neighbors(n).is_empty());
        let has_full = comp.iter().any(|n| !self.full_neighbors(n).is_empty());
        match (has_dashed, has_full) {
            (true, true) => ComponentKind::Mixed,
            (true, false) => ComponentKind::Dashed,
            (false, true) => ComponentKind::Full,
            (false, false) => ComponentKind::Singleton,
        }
    }

    /// Connected components, classified; singletons take their side from
    /// `resolve_partition`.
    pub fn components(&self) -> Result<Vec<Component>> {
        let part = self.resolve_partition()?;
        Ok(self
            .undirected_components()
            .into_iter()
            .map(|nodes| Component { nodes, kind: self.component_kind(nodes), context: nodes.is_subset(part.context) })
            .collect())
    }

    /// Splits the nodes into response set `u` and context set `v`.
    ///
    /// Full-line endpoints and declared context nodes are context. Nodes with
    /// no dashed line and no incoming arrow default to context unless
    /// declared response.
    pub fn resolve_partition(&self) -> Result<Partition> {
        let declared_context = self.context_decl.unwrap_or_default();
        for n in declared_context {
            if !self.dashed_neighbors(n).is_empty() {
                return Err(Error::PartitionConflict { node: n, declared: "context", reason: "has a dashed line" });
            }
            if !self.parents_of(n).is_empty() {
                return Err(Error::PartitionConflict { node: n, declared: "context", reason: "has an incoming arrow" });
            }
        }
        for n in self.response_decl {
            if !self.full_neighbors(n).is_empty() {
                return Err(Error::PartitionConflict { node: n, declared: "response", reason: "has a full line" });
            }
        }
        let mut context = declared_context;
        for n in self.nodes {
            let full_endpoint = !self.full_neighbors(n).is_empty();
            let ambiguous = self.dashed_neighbors(n).is_empty() && self.parents_of(n).is_empty();
            if full_endpoint || (ambiguous && !self.response_decl.contains(n)) {
                context.insert(n);
            }
        }
        Ok(Partition { response: self.nodes.difference(context), context })
    }

    /// Every violated regression-graph constraint. Empty iff the graph is a
    /// regression graph admitting a valid ordering.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut by_pair: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
        for e in &self.edges {
            *by_pair.entry(e.pair()).or_default() += 1;
        }
        for (&(a, b), &count) in &by_pair {
            if count > 1 {
                out.push(Violation::MultipleEdges { a, b });
            }
        }

        for n in self.nodes {
            if !self.full_neighbors(n).is_empty() && !self.dashed_neighbors(n).is_empty() {
                out.push(Violation::FullAndDashedAtNode { node: n });
            }
        }
        for e in &self.edges {
            if let Edge::Arrow { tail, head } = *e {
                if !self.full_neighbors(head).is_empty() {
                    out.push(Violation::ArrowIntoFullLineNode { tail, head });
                }
            }
        }

        let comps = self.undirected_components();
        for &c in &comps {
            if self.component_kind(c) == ComponentKind::Mixed {
                out.push(Violation::MixedComponent { nodes: c });
            }
        }
        let comp_of = |n: NodeId| comps.iter().position(|c| c.contains(n)).unwrap();
        let mut inside = false;
        for e in &self.edges {
            if let Edge::Arrow { tail, head } = *e {
                if comp_of(tail) == comp_of(head) {
                    out.push(Violation::ArrowInsideComponent { tail, head });
                    inside = true;
                }
            }
        }
        // Cycles through a single component are already reported above.
        if !inside {
            if let Some(cycle) = component_cycle(self, &comps) {
                out.push(Violation::ComponentCycle { components: cycle });
            }
        }

        if let Some(ctx) = self.context_decl {
            for n in self.nodes {
                if !self.full_neighbors(n).is_empty() && !ctx.contains(n) {
                    out.push(Violation::FullLineOutsideContext { node: n });
                }
            }
            for n in ctx {
                if !self.dashed_neighbors(n).is_empty() {
                    out.push(Violation::ContextWithDashed { node: n });
                }
                if !self.parents_of(n).is_empty() {
                    out.push(Violation::ContextWithIncomingArrow { node: n });
                }
            }
        }
        for n in self.response_decl {
            if !self.full_neighbors(n).is_empty() {
                out.push(Violation::ResponseWithFullLine { node: n });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

fn ix(n: NodeId) -> usize {
    n.get() as usize
}

/// Finds a directed cycle in the component graph (edge from the tail's
/// component to the head's component), if any.
fn component_cycle(g: &RegressionGraph, comps: &[NodeSet]) -> Option<Vec<NodeSet>> {
    let k = comps.len();
    let comp_of = |n: NodeId| comps.iter().position(|c| c.contains(n)).unwrap();
    let mut succ = vec![Vec::new(); k];
    for e in g.edges() {
        if let Edge::Arrow { tail, head } = *e {
            let (p, q) = (comp_of(tail), comp_of(head));
            if p != q && !succ[p].contains(&q) {
                succ[p].push(q);
            }
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; k];
    let mut path = Vec::new();
    fn dfs(v: usize, succ: &[Vec<usize>], state: &mut [u8], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[v] = 1;
        path.push(v);
        for &w in &succ[v] {
            if state[w] == 1 {
                let start = path.iter().position(|&x| x == w).unwrap();
                return Some(path[start..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, succ, state, path) {
                    return Some(c);
                }
            }
        }
        path.pop();
        state[v] = 2;
        None
    }
    for v in 0..k {
        if state[v] == 0 {
            if let Some(c) = dfs(v, &succ, &mut state, &mut path) {
                return Some(c.into_iter().map(|i| comps[i]).collect());
            }
        }
    }
    None
}
