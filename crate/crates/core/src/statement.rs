//! Conditional independence statements `A ⫫ B | C` over node sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::{parse_node_list, NodeId, NodeSet};

/// `A ⫫ B | C` with `A`, `B` nonempty and all three sets disjoint. Stored
/// canonically: the lexicographically smaller of `A`, `B` comes first, so
/// a statement and its symmetric form compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndependenceStatement {
    #[serde(rename = "A")]
    a: NodeSet,
    #[serde(rename = "B")]
    b: NodeSet,
    #[serde(rename = "C")]
    c: NodeSet,
}

impl IndependenceStatement {
    pub fn new(a: NodeSet, b: NodeSet, c: NodeSet) -> Result<Self> {
        check(a, b, c)?;
        Ok(Self::new_unchecked(a, b, c))
    }

    pub(crate) fn new_unchecked(a: NodeSet, b: NodeSet, c: NodeSet) -> Self {
        if b < a {
            IndependenceStatement { a: b, b: a, c }
        } else {
            IndependenceStatement { a, b, c }
        }
    }

    /// `i ⫫ j | c` for single nodes.
    pub fn pair(i: NodeId, j: NodeId, c: NodeSet) -> Result<Self> {
        Self::new(NodeSet::singleton(i), NodeSet::singleton(j), c)
    }

    pub fn a(&self) -> NodeSet {
        self.a
    }

    pub fn b(&self) -> NodeSet {
        self.b
    }

    pub fn c(&self) -> NodeSet {
        self.c
    }

    pub fn nodes(&self) -> NodeSet {
        self.a.union(self.b).union(self.c)
    }

    pub fn is_pairwise(&self) -> bool {
        self.a.len() == 1 && self.b.len() == 1
    }
}

pub(crate) fn check(a: NodeSet, b: NodeSet, c: NodeSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySide);
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::NotDisjoint(a, b, c));
    }
    Ok(())
}

/// `A | B | C`, sets as comma-separated ascending ids, `-` for empty.
impl fmt::Display for IndependenceStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {} | {}", self.a, self.b, self.c)
    }
}

impl FromStr for IndependenceStatement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b, c) = parse_triple(s)?;
        Self::new(a, b, c)
    }
}

/// Splits `A | B | C` into its three sets without checking disjointness.
pub fn parse_triple(s: &str) -> Result<(NodeSet, NodeSet, NodeSet)> {
    let syntax = |message: String| Error::Syntax { line: 0, message };
    let parts: Vec<&str> = s.split('|').collect();
    if parts.len() != 3 {
        return Err(syntax(format!("expected `A | B | C`, found `{}`", s.trim())));
    }
    let a = parse_node_list(parts[0]).map_err(syntax)?;
    let b = parse_node_list(parts[1]).map_err(syntax)?;
    let c = parse_node_list(parts[2]).map_err(syntax)?;
    Ok((a, b, c))
}

pub type StatementSet = BTreeSet<IndependenceStatement>;

/// Parses a statement file: one statement per line, `#` comments.
pub fn parse_statements(text: &str) -> Result<Vec<IndependenceStatement>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let stmt = content.parse().map_err(|e| match e {
            Error::Syntax { message, .. } => Error::Syntax { line: k + 1, message },
            other => Error::Syntax { line: k + 1, message: other.to_string() },
        })?;
        out.push(stmt);
    }
    Ok(out)
}

pub fn format_statements<'a>(stmts: impl IntoIterator<Item = &'a IndependenceStatement>) -> String {
    stmts.into_iter().map(|s| format!("{s}\n")).collect()
}
