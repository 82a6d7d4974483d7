//! Pairwise Markov properties. Each property is a strategy that picks the
//! conditioning set for a missing edge; strategies are registered by name
//! and selected at runtime.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Partition, RegressionGraph};
use crate::nodeset::{NodeId, NodeSet};
use crate::ordering::{pair_sets, ComponentOrdering, PairSets};
use crate::statement::{IndependenceStatement, StatementSet};

/// An uncoupled response pair, oriented by the complete node ordering.
pub struct PairContext<'a> {
    pub graph: &'a RegressionGraph,
    pub ordering: &'a ComponentOrdering,
    /// The earlier node `i`; always a response node.
    pub lower: NodeId,
    /// The later node `j`.
    pub upper: NodeId,
    pub sets: PairSets,
}

impl PairContext<'_> {
    pub fn same_component(&self) -> bool {
        self.ordering.position(self.lower) == self.ordering.position(self.upper)
    }
}

/// Chooses the conditioning set `S` in `i ⫫ j | S` for a missing edge
/// between a response node `i` and a later node `j`. Pairs of context nodes
/// never reach a strategy; they always condition on the rest of the
/// context set.
pub trait PairwiseMarkov: Send + Sync {
    fn name(&self) -> &str;

    fn summary(&self) -> &str;

    fn conditioning_set(&self, pair: &PairContext<'_>) -> NodeSet;
}

/// (P1): the past of the pair.
pub struct Past;

impl PairwiseMarkov for Past {
    fn name(&self) -> &str {
        "p1"
    }
    fn summary(&self) -> &str {
        "past: pst(i,j)"
    }
    fn conditioning_set(&self, pair: &PairContext<'_>) -> NodeSet {
        pair.sets.pst
    }
}

/// (P2): the anteriors of the pair.
pub struct Anteriors;

impl PairwiseMarkov for Anteriors {
    fn name(&self) -> &str {
        "p2"
    }
    fn summary(&self) -> &str {
        "anteriors: ant(i,j)"
    }
    fn conditioning_set(&self, pair: &PairContext<'_>) -> NodeSet {
        pair.sets.ant
    }
}

/// (P3): the joint parents of the pair.
pub struct JointParents;

impl PairwiseMarkov for JointParents {
    fn name(&self) -> &str {
        "p3"
    }
    fn summary(&self) -> &str {
        "joint parents: par(i,j)"
    }
    fn conditioning_set(&self, pair: &PairContext<'_>) -> NodeSet {
        pair.sets.par
    }
}

/// (P4): the parents of the earlier node. With `use_par_j`, pairs inside
/// one component condition on the parents of the later node instead.
pub struct ParentsOfLower {
    pub use_par_j: bool,
}

impl PairwiseMarkov for ParentsOfLower {
    fn name(&self) -> &str {
        if self.use_par_j {
            "p4j"
        } else {
            "p4"
        }
    }
    fn summary(&self) -> &str {
        if self.use_par_j {
            "parents of the later node within a component, else par(i)"
        } else {
            "parents of the earlier node: par(i)"
        }
    }
    fn conditioning_set(&self, pair: &PairContext<'_>) -> NodeSet {
        let node = if self.use_par_j && pair.same_component() { pair.upper } else { pair.lower };
        pair.graph.parents_of(node)
    }
}

/// Names one of the built-in properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairwiseProperty {
    P1Past,
    P2Anteriors,
    P3JointParents,
    P4ParentsOfLower { use_par_j: bool },
}

static PAST: Past = Past;
static ANTERIORS: Anteriors = Anteriors;
static JOINT_PARENTS: JointParents = JointParents;
static PARENTS_OF_LOWER: ParentsOfLower = ParentsOfLower { use_par_j: false };
static PARENTS_OF_LOWER_J: ParentsOfLower = ParentsOfLower { use_par_j: true };

impl PairwiseProperty {
    pub const ALL: [PairwiseProperty; 4] = [
        PairwiseProperty::P1Past,
        PairwiseProperty::P2Anteriors,
        PairwiseProperty::P3JointParents,
        PairwiseProperty::P4ParentsOfLower { use_par_j: false },
    ];

    pub fn strategy(self) -> &'static dyn PairwiseMarkov {
        match self {
            PairwiseProperty::P1Past => &PAST,
            PairwiseProperty::P2Anteriors => &ANTERIORS,
            PairwiseProperty::P3JointParents => &JOINT_PARENTS,
            PairwiseProperty::P4ParentsOfLower { use_par_j: false } => &PARENTS_OF_LOWER,
            PairwiseProperty::P4ParentsOfLower { use_par_j: true } => &PARENTS_OF_LOWER_J,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairwiseProperty::P1Past => "p1",
            PairwiseProperty::P2Anteriors => "p2",
            PairwiseProperty::P3JointParents => "p3",
            PairwiseProperty::P4ParentsOfLower { use_par_j: false } => "p4",
            PairwiseProperty::P4ParentsOfLower { use_par_j: true } => "p4j",
        }
    }

    /// P2 and P3 do not depend on the ordering.
    pub fn ordering_dependent(self) -> bool {
        matches!(self, PairwiseProperty::P1Past | PairwiseProperty::P4ParentsOfLower { .. })
    }
}

impl fmt::Display for PairwiseProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairwiseProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1" | "past" => Ok(PairwiseProperty::P1Past),
            "p2" | "ant" | "anteriors" => Ok(PairwiseProperty::P2Anteriors),
            "p3" | "par" | "joint-parents" => Ok(PairwiseProperty::P3JointParents),
            "p4" | "par-lower" => Ok(PairwiseProperty::P4ParentsOfLower { use_par_j: false }),
            "p4j" => Ok(PairwiseProperty::P4ParentsOfLower { use_par_j: true }),
            _ => Err(Error::UnknownProperty(s.to_string())),
        }
    }
}

/// Pairwise properties by name.
#[derive(Default)]
pub struct PropertyRegistry {
    entries: BTreeMap<String, Box<dyn PairwiseMarkov>>,
}

impl PropertyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `p1`, `p2`, `p3`, `p4` and the `p4j` variant.
    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(Past));
        r.register(Box::new(Anteriors));
        r.register(Box::new(JointParents));
        r.register(Box::new(ParentsOfLower { use_par_j: false }));
        r.register(Box::new(ParentsOfLower { use_par_j: true }));
        r
    }

    /// Returns the strategy previously registered under the same name.
    pub fn register(&mut self, strategy: Box<dyn PairwiseMarkov>) -> Option<Box<dyn PairwiseMarkov>> {
        self.entries.insert(strategy.name().to_ascii_lowercase(), strategy)
    }

    pub fn get(&self, name: &str) -> Result<&dyn PairwiseMarkov> {
        self.entries
            .get(&name.to_ascii_lowercase())
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownProperty(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn PairwiseMarkov> {
        self.entries.values().map(|b| b.as_ref())
    }
}

/// How an uncoupled pair is interpreted.
#[derive(Debug, Clone, Copy)]
pub enum PairClass {
    /// Both nodes in the context set: condition on the rest of it.
    Context { rest: NodeSet },
    /// Earlier node is a response node.
    Response { sets: PairSets },
}

/// Every uncoupled pair `(i, j)` with `i` earlier in the complete ordering.
pub fn classify_pairs(g: &RegressionGraph, ordering: &ComponentOrdering) -> Result<Vec<(NodeId, NodeId, PairClass)>> {
    let Partition { context, .. } = g.resolve_partition()?;
    let mut out = Vec::new();
    for (a, b) in g.uncoupled_pairs() {
        let (i, j) = if ordering.precedes(a, b) { (a, b) } else { (b, a) };
        let class = if context.contains(i) && context.contains(j) {
            PairClass::Context { rest: context.without(i).without(j) }
        } else {
            PairClass::Response { sets: pair_sets(g, ordering, i, j)? }
        };
        out.push((i, j, class));
    }
    Ok(out)
}

/// The statements one pairwise property assigns to the missing edges.
pub fn pairwise_statements(
    g: &RegressionGraph,
    ordering: &ComponentOrdering,
    property: &dyn PairwiseMarkov,
) -> Result<StatementSet> {
    let mut out = StatementSet::new();
    for (i, j, class) in classify_pairs(g, ordering)? {
        let cond = match class {
            PairClass::Context { rest } => rest,
            PairClass::Response { sets } => {
                property.conditioning_set(&PairContext { graph: g, ordering, lower: i, upper: j, sets })
            }
        };
        out.insert(IndependenceStatement::pair(i, j, cond)?);
    }
    Ok(out)
}

/// Conditioning sets of one uncoupled pair under each property.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub i: NodeId,
    pub j: NodeId,
    pub context_pair: bool,
    pub pst: NodeSet,
    pub ant: NodeSet,
    pub par: NodeSet,
    pub par_lower: NodeSet,
}

pub fn statement_report(g: &RegressionGraph, ordering: &ComponentOrdering) -> Result<Vec<ReportRow>> {
    let mut rows: Vec<ReportRow> = classify_pairs(g, ordering)?
        .into_iter()
        .map(|(i, j, class)| match class {
            PairClass::Context { rest } => {
                ReportRow { i, j, context_pair: true, pst: rest, ant: rest, par: rest, par_lower: rest }
            }
            PairClass::Response { sets } => ReportRow {
                i,
                j,
                context_pair: false,
                pst: sets.pst,
                ant: sets.ant,
                par: sets.par,
                par_lower: g.parents_of(i),
            },
        })
        .collect();
    rows.sort_by_key(|r| (r.i.min(r.j), r.i.max(r.j)));
    Ok(rows)
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                format!("{},{}", r.i, r.j),
                r.pst.to_string(),
                r.ant.to_string(),
                r.par.to_string(),
                r.par_lower.to_string(),
            ]
        })
        .collect();
    let header = ["pair", "p1 pst", "p2 ant", "p3 par", "p4 par(i)"];
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cols: &[&str]| {
        let parts: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header);
    for row in &cells {
        let refs: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&refs);
    }
    out
}

/// A pair where `par(i) ⊆ par(i,j) ⊆ ant(i,j) ⊆ pst(i,j)` fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingViolation {
    pub i: NodeId,
    pub j: NodeId,
    pub detail: &'static str,
}

pub fn check_nesting(g: &RegressionGraph, ordering: &ComponentOrdering) -> Result<Vec<NestingViolation>> {
    let mut out = Vec::new();
    for (i, j, class) in classify_pairs(g, ordering)? {
        let PairClass::Response { sets } = class else { continue };
        let checks = [
            (g.parents_of(i).is_subset(sets.par), "par(i) not within par(i,j)"),
            (sets.par.is_subset(sets.ant), "par(i,j) not within ant(i,j)"),
            (sets.ant.is_subset(sets.pst), "ant(i,j) not within pst(i,j)"),
        ];
        for (ok, detail) in checks {
            if !ok {
                out.push(NestingViolation { i, j, detail });
            }
        }
    }
    Ok(out)
}
