//! Graph file formats: a line-oriented text format and an equivalent JSON
//! document. Both serialize canonically.
//!
//! ```text
//! node <id> [context|response]
//! <a> -- <b>      full line
//! <a> ~~ <b>      dashed line
//! <j> -> <i>      arrow pointing to i from j
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeType, RegressionGraph};
use crate::nodeset::{NodeId, NodeSet, MAX_NODE};

/// Parses either format; input whose first non-blank character is `{` is
/// read as JSON. Does not validate regression-graph constraints.
pub fn parse_graph(text: &str) -> Result<RegressionGraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Context,
    Response,
    Unspecified,
}

pub fn parse_text(text: &str) -> Result<RegressionGraph> {
    let mut nodes = NodeSet::EMPTY;
    let mut roles: BTreeMap<NodeId, Role> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut pairs: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| Error::Syntax { line, message };

        if tokens[0] == "node" {
            let role = match tokens.len() {
                2 => Role::Unspecified,
                3 => match tokens[2] {
                    "context" => Role::Context,
                    "response" => Role::Response,
                    other => return Err(syntax(format!("unknown node role `{other}`"))),
                },
                _ => return Err(syntax("expected `node <id> [context|response]`".into())),
            };
            let id = parse_id(tokens[1]).map_err(syntax)?;
            nodes.insert(id);
            let prev = roles.entry(id).or_insert(Role::Unspecified);
            if *prev != Role::Unspecified && role != Role::Unspecified && *prev != role {
                return Err(syntax(format!("node {id} declared both context and response")));
            }
            if role != Role::Unspecified {
                *prev = role;
            }
            continue;
        }

        if tokens.len() != 3 {
            return Err(syntax(format!("expected `<a> <op> <b>`, found `{content}`")));
        }
        let kind = match tokens[1] {
            "--" => EdgeType::Full,
            "~~" => EdgeType::Dashed,
            "->" => EdgeType::Arrow,
            op => return Err(syntax(format!("unknown edge operator `{op}`"))),
        };
        let a = parse_id(tokens[0]).map_err(syntax)?;
        let b = parse_id(tokens[2]).map_err(syntax)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let pair = (a.min(b), a.max(b));
        if pairs.insert(pair, line).is_some() {
            return Err(Error::DuplicateEdge { line, a: pair.0, b: pair.1 });
        }
        edges.push(Edge::of_type(kind, a, b));
    }

    let pick = |role: Role| -> NodeSet { roles.iter().filter(|(_, r)| **r == role).map(|(n, _)| *n).collect() };
    let context = pick(Role::Context);
    RegressionGraph::new(nodes, edges, Some(context), pick(Role::Response))
}

fn parse_id(tok: &str) -> std::result::Result<NodeId, String> {
    let id: u32 = tok.parse().map_err(|_| format!("invalid node id `{tok}`"))?;
    NodeId::new(id).ok_or_else(|| format!("node id {id} out of range 1..={MAX_NODE}"))
}

/// Canonical text form: every node declared in ascending order, then the
/// edges sorted by (kind, a, b).
pub fn to_text(g: &RegressionGraph) -> String {
    let mut out = String::new();
    let context = g.context_decl().unwrap_or_default();
    for n in g.nodes() {
        if context.contains(n) {
            let _ = writeln!(out, "node {n} context");
        } else if g.response_decl().contains(n) {
            let _ = writeln!(out, "node {n} response");
        } else {
            let _ = writeln!(out, "node {n}");
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "{e}");
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<u32>,
    #[serde(default)]
    pub context: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub response: Vec<u32>,
    pub edges: Vec<EdgeDocument>,
}

/// For arrows, `a` is the tail and `b` the head.
#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub kind: EdgeType,
    pub a: u32,
    pub b: u32,
}

impl From<&RegressionGraph> for GraphDocument {
    fn from(g: &RegressionGraph) -> Self {
        let ids = |s: NodeSet| s.iter().map(NodeId::get).collect();
        GraphDocument {
            nodes: ids(g.nodes()),
            context: ids(g.context_decl().unwrap_or_default()),
            response: ids(g.response_decl()),
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    let (a, b) = e.endpoints();
                    EdgeDocument { kind: e.kind(), a: a.get(), b: b.get() }
                })
                .collect(),
        }
    }
}

impl TryFrom<GraphDocument> for RegressionGraph {
    type Error = Error;

    fn try_from(doc: GraphDocument) -> Result<Self> {
        let id = |i: u32| NodeId::new(i).ok_or_else(|| Error::Json(format!("node id {i} out of range")));
        let set = |v: &[u32]| v.iter().map(|&i| id(i)).collect::<Result<NodeSet>>();
        let mut pairs = NodeSetPairs::default();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            let (a, b) = (id(e.a)?, id(e.b)?);
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !pairs.insert(a, b) {
                return Err(Error::Json(format!("duplicate edge for pair {},{}", a.min(b), a.max(b))));
            }
            edges.push(Edge::of_type(e.kind, a, b));
        }
        RegressionGraph::new(set(&doc.nodes)?, edges, Some(set(&doc.context)?), set(&doc.response)?)
    }
}

#[derive(Default)]
struct NodeSetPairs(std::collections::BTreeSet<(NodeId, NodeId)>);

impl NodeSetPairs {
    fn insert(&mut self, a: NodeId, b: NodeId) -> bool {
        self.0.insert((a.min(b), a.max(b)))
    }
}

pub fn parse_json(text: &str) -> Result<RegressionGraph> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    doc.try_into()
}

pub fn to_json(g: &RegressionGraph) -> String {
    serde_json::to_string_pretty(&GraphDocument::from(g)).expect("graph serializes")
}
