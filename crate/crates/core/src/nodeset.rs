//! Node identifiers and small fixed-capacity node sets.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported node id. Node sets are single 64-bit masks.
pub const MAX_NODE: u32 = 64;

/// A variable in the graph, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(id: u32) -> Option<Self> {
        (1..=MAX_NODE).contains(&id).then_some(NodeId(id))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn bit(self) -> u64 {
        1u64 << (self.0 - 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Set of nodes backed by a bitmask; iteration is ascending by id.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(n: NodeId) -> Self {
        NodeSet(n.bit())
    }

    /// Builds a set from raw ids; panics on ids outside `1..=64`. Intended for
    /// literals in tests and fixtures.
    pub fn of(ids: &[u32]) -> Self {
        ids.iter().map(|&i| NodeId::new(i).unwrap_or_else(|| panic!("node id {i} out of range"))).collect()
    }

    pub fn contains(self, n: NodeId) -> bool {
        self.0 & n.bit() != 0
    }

    pub fn insert(&mut self, n: NodeId) {
        self.0 |= n.bit();
    }

    pub fn remove(&mut self, n: NodeId) {
        self.0 &= !n.bit();
    }

    pub fn with(self, n: NodeId) -> Self {
        NodeSet(self.0 | n.bit())
    }

    pub fn without(self, n: NodeId) -> Self {
        NodeSet(self.0 & !n.bit())
    }

    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<NodeId> {
        (self.0 != 0).then(|| NodeId(self.0.trailing_zeros() + 1))
    }

    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets { mask: self.0, current: 0, done: false }
    }

    /// Nonempty proper subsets.
    pub fn proper_nonempty_subsets(self) -> impl Iterator<Item = NodeSet> {
        let full = self;
        self.subsets().filter(move |s| !s.is_empty() && *s != full)
    }

    pub fn to_vec(self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

/// Sets compare lexicographically by their ascending element sequences.
impl Ord for NodeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for NodeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        let mut s = NodeSet::EMPTY;
        for n in iter {
            s.insert(n);
        }
        s
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = NodeSetIter;

    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

/// Comma-separated ascending ids, `-` for the empty set.
impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let mut first = true;
        for n in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<u32>::deserialize(d)?;
        ids.into_iter()
            .map(|i| NodeId::new(i).ok_or_else(|| serde::de::Error::custom(format!("node id {i} out of range"))))
            .collect()
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(NodeId(tz + 1))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NodeSetIter {}

/// Enumerates submasks in increasing numeric order.
pub struct Subsets {
    mask: u64,
    current: u64,
    done: bool,
}

impl Iterator for Subsets {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        if self.done {
            return None;
        }
        let out = self.current;
        if out == self.mask {
            self.done = true;
        } else {
            self.current = (self.current.wrapping_sub(self.mask)) & self.mask;
        }
        Some(NodeSet(out))
    }
}

/// Parses `1,2,3`, an empty string, or `-` into a set.
pub fn parse_node_list(text: &str) -> Result<NodeSet, String> {
    let t = text.trim();
    if t.is_empty() || t == "-" {
        return Ok(NodeSet::EMPTY);
    }
    let mut set = NodeSet::EMPTY;
    for part in t.split(',') {
        let p = part.trim();
        let id: u32 = p.parse().map_err(|_| format!("invalid node id `{p}`"))?;
        let n = NodeId::new(id).ok_or_else(|| format!("node id {id} out of range 1..={MAX_NODE}"))?;
        set.insert(n);
    }
    Ok(set)
}
