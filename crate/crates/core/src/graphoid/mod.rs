//! Compositional graphoid inference over independence statements.
//!
//! Six rules: symmetry, decomposition, weak union, contraction,
//! intersection and composition. Statements are stored canonically, so
//! symmetry is always in force inside the closure; it only shows up as an
//! explicit step in proof traces, where orientation matters.

mod closure;
mod derive;
mod transitivity;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

pub use closure::{closure, Budget, Closure};
pub use derive::{derive, Derivation, ProofStep, ProofTrace};
pub use transitivity::{check_singleton_transitivity, TransitivityViolation};

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::statement::{check, parse_triple, IndependenceStatement, StatementSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Symmetry,
        Rule::Decomposition,
        Rule::WeakUnion,
        Rule::Contraction,
        Rule::Intersection,
        Rule::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Symmetry => "symmetry",
            Rule::Decomposition => "decomposition",
            Rule::WeakUnion => "weak_union",
            Rule::Contraction => "contraction",
            Rule::Intersection => "intersection",
            Rule::Composition => "composition",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::Syntax { line: 0, message: format!("unknown rule `{s}`") })
    }
}

/// A subset of the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet(u8);

impl RuleSet {
    pub const ALL: RuleSet = RuleSet(0b11_1111);
    /// Properties (i) to (v), without composition.
    pub const GRAPHOID: RuleSet = RuleSet(0b01_1111);

    pub fn contains(self, r: Rule) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn without(self, r: Rule) -> RuleSet {
        RuleSet(self.0 & !r.bit())
    }
}

impl FromIterator<Rule> for RuleSet {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        RuleSet(iter.into_iter().fold(0, |acc, r| acc | r.bit()))
    }
}

/// A statement with a fixed orientation: `a ⫫ b | c` as written. Rules
/// operate on oriented statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Oriented {
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
}

impl Oriented {
    pub fn new(a: NodeSet, b: NodeSet, c: NodeSet) -> Result<Self> {
        check(a, b, c)?;
        Ok(Oriented { a, b, c })
    }

    pub fn canonical(self) -> IndependenceStatement {
        IndependenceStatement::new_unchecked(self.a, self.b, self.c)
    }

    pub fn swapped(self) -> Oriented {
        Oriented { a: self.b, b: self.a, c: self.c }
    }
}

impl From<IndependenceStatement> for Oriented {
    fn from(s: IndependenceStatement) -> Self {
        Oriented { a: s.a(), b: s.b(), c: s.c() }
    }
}

impl fmt::Display for Oriented {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {} | {}", self.a, self.b, self.c)
    }
}

impl FromStr for Oriented {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b, c) = parse_triple(s)?;
        Oriented::new(a, b, c)
    }
}

impl Serialize for Oriented {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn both(s: IndependenceStatement) -> [Oriented; 2] {
    let o = Oriented::from(s);
    [o, o.swapped()]
}

/// One-premise conclusions of `rule` from `x` exactly as oriented.
fn unary(rule: Rule, x: Oriented, out: &mut Vec<Oriented>) {
    match rule {
        Rule::Symmetry => out.push(x.swapped()),
        Rule::Decomposition => {
            for sub in x.b.proper_nonempty_subsets() {
                out.push(Oriented { a: x.a, b: sub, c: x.c });
            }
        }
        Rule::WeakUnion => {
            for moved in x.b.proper_nonempty_subsets() {
                out.push(Oriented { a: x.a, b: x.b.difference(moved), c: x.c.union(moved) });
            }
        }
        _ => {}
    }
}

/// Two-premise conclusion of `rule` with `x` first and `y` second.
fn binary(rule: Rule, x: Oriented, y: Oriented) -> Option<Oriented> {
    if x.a != y.a {
        return None;
    }
    let a = x.a;
    match rule {
        // a ⫫ b | dc and a ⫫ d | c  =>  a ⫫ bd | c
        Rule::Contraction => {
            let (b, d) = (x.b, y.b);
            let c = y.c;
            (d.is_subset(x.c) && x.c.difference(d) == c).then(|| Oriented { a, b: b.union(d), c })
        }
        // a ⫫ d | bc and a ⫫ b | dc  =>  a ⫫ bd | c
        Rule::Intersection => {
            let (d, b) = (x.b, y.b);
            if !b.is_subset(x.c) || !d.is_subset(y.c) {
                return None;
            }
            let c = x.c.difference(b);
            (y.c.difference(d) == c).then(|| Oriented { a, b: b.union(d), c })
        }
        // a ⫫ d | c and a ⫫ b | c  =>  a ⫫ bd | c
        Rule::Composition => (x.c == y.c && x.b.is_disjoint(y.b)).then(|| Oriented { a, b: x.b.union(y.b), c: x.c }),
        _ => None,
    }
}

/// Conclusions of one application of `rule` to premises taken exactly as
/// oriented and in the given order.
pub fn apply_oriented(rule: Rule, premises: &[Oriented]) -> Vec<Oriented> {
    let mut out = Vec::new();
    match premises {
        [x] => unary(rule, *x, &mut out),
        [x, y] => out.extend(binary(rule, *x, *y)),
        _ => {}
    }
    out
}

/// Every conclusion obtainable by one application of `rule` to the
/// premises, in either orientation and any order.
pub fn apply_rule(rule: Rule, premises: &[IndependenceStatement]) -> StatementSet {
    let mut out = StatementSet::new();
    let mut buf = Vec::new();
    for (k, &p) in premises.iter().enumerate() {
        for x in both(p) {
            buf.clear();
            unary(rule, x, &mut buf);
            out.extend(buf.iter().map(|o| o.canonical()));
            for (m, &q) in premises.iter().enumerate() {
                if m == k {
                    continue;
                }
                for y in both(q) {
                    if let Some(z) = binary(rule, x, y) {
                        out.insert(z.canonical());
                    }
                }
            }
        }
    }
    out
}
