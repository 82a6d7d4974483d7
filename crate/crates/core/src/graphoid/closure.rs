use std::collections::{HashMap, HashSet, VecDeque};

use super::{both, unary, Oriented, Rule, RuleSet};
use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::statement::{IndependenceStatement, StatementSet};

/// Limits for closure and derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_statements: usize,
    /// Closure: statements expanded. Derivation: breadth-first layers.
    pub max_iterations: usize,
    /// Conclusions with a side larger than this are dropped.
    pub max_side: Option<usize>,
}

pub const BUDGET_ENV: &str = "REGMARK_BUDGET";

impl Default for Budget {
    fn default() -> Self {
        Budget { max_statements: 2_000_000, max_iterations: usize::MAX, max_side: None }
    }
}

impl Budget {
    pub fn statements(max_statements: usize) -> Self {
        Budget { max_statements, ..Budget::default() }
    }

    /// The default budget, with `REGMARK_BUDGET` overriding the statement
    /// limit when set to a positive integer.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(n) = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            if n > 0 {
                b.max_statements = n;
            }
        }
        b
    }

    pub(super) fn admits(&self, o: &Oriented) -> bool {
        self.max_side.is_none_or(|m| o.a.len() <= m && o.b.len() <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub statements: StatementSet,
    pub saturated: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Premises {
    One(Oriented),
    Two(Oriented, Oriented),
}

impl Premises {
    pub(super) fn to_vec(self) -> Vec<Oriented> {
        match self {
            Premises::One(x) => vec![x],
            Premises::Two(x, y) => vec![x, y],
        }
    }
}

pub(super) type Consequence = (Rule, Premises, Oriented);

/// Known statements with an index on `(A, C)` over both orientations, so
/// binary rules find their partners without scanning.
#[derive(Default)]
pub(super) struct Store {
    known: HashSet<IndependenceStatement>,
    by_ac: HashMap<(NodeSet, NodeSet), Vec<NodeSet>>,
}

impl Store {
    pub(super) fn insert(&mut self, s: IndependenceStatement) -> bool {
        if !self.known.insert(s) {
            return false;
        }
        for o in both(s) {
            self.by_ac.entry((o.a, o.c)).or_default().push(o.b);
        }
        true
    }

    pub(super) fn contains(&self, s: &IndependenceStatement) -> bool {
        self.known.contains(s)
    }

    pub(super) fn len(&self) -> usize {
        self.known.len()
    }

    fn has(&self, o: Oriented) -> bool {
        self.known.contains(&o.canonical())
    }

    fn partners(&self, a: NodeSet, c: NodeSet) -> &[NodeSet] {
        self.by_ac.get(&(a, c)).map_or(&[], Vec::as_slice)
    }

    /// Every conclusion with `o` as a premise and, for binary rules, a
    /// partner already in the store. Pushed in a fixed order.
    pub(super) fn consequences(&self, o: Oriented, rules: RuleSet, out: &mut Vec<Consequence>) {
        let mut buf = Vec::new();
        for rule in [Rule::Decomposition, Rule::WeakUnion] {
            if rules.contains(rule) {
                buf.clear();
                unary(rule, o, &mut buf);
                out.extend(buf.iter().map(|&z| (rule, Premises::One(o), z)));
            }
        }
        let a = o.a;
        if rules.contains(Rule::Contraction) {
            // o = a ⫫ b | dc as the first premise
            for d in o.c.subsets().filter(|d| !d.is_empty()) {
                let c = o.c.difference(d);
                let y = Oriented { a, b: d, c };
                if self.has(y) {
                    out.push((Rule::Contraction, Premises::Two(o, y), Oriented { a, b: o.b.union(d), c }));
                }
            }
            // o = a ⫫ d | c as the second premise
            for &b in self.partners(a, o.c.union(o.b)) {
                let x = Oriented { a, b, c: o.c.union(o.b) };
                out.push((Rule::Contraction, Premises::Two(x, o), Oriented { a, b: b.union(o.b), c: o.c }));
            }
        }
        if rules.contains(Rule::Intersection) {
            // o = a ⫫ d | bc; the rule is symmetric in its two premises
            for b in o.c.subsets().filter(|b| !b.is_empty()) {
                let c = o.c.difference(b);
                let y = Oriented { a, b, c: c.union(o.b) };
                if self.has(y) {
                    out.push((Rule::Intersection, Premises::Two(o, y), Oriented { a, b: b.union(o.b), c }));
                }
            }
        }
        if rules.contains(Rule::Composition) {
            for &d in self.partners(a, o.c) {
                if d.is_disjoint(o.b) {
                    let y = Oriented { a, b: d, c: o.c };
                    out.push((Rule::Composition, Premises::Two(o, y), Oriented { a, b: o.b.union(d), c: o.c }));
                }
            }
        }
    }
}

/// Least set containing `premises` and closed under `rules`, computed by
/// semi-naive forward chaining: each statement is expanded once, against
/// the statements known at that moment, so every premise pair is met when
/// its later member is expanded.
pub fn closure<'a>(
    premises: impl IntoIterator<Item = &'a IndependenceStatement>,
    universe: NodeSet,
    rules: RuleSet,
    budget: Budget,
) -> Result<Closure> {
    let mut store = Store::default();
    let mut queue = VecDeque::new();
    for &p in premises {
        let outside = p.nodes().difference(universe);
        if !outside.is_empty() {
            return Err(Error::UnknownNodes(outside));
        }
        if store.insert(p) {
            queue.push_back(p);
        }
    }

    let mut saturated = true;
    let mut iterations = 0;
    let mut out = Vec::new();
    'run: while let Some(s) = queue.pop_front() {
        if iterations >= budget.max_iterations {
            saturated = false;
            break;
        }
        iterations += 1;
        for o in both(s) {
            out.clear();
            store.consequences(o, rules, &mut out);
            for &(_, _, z) in &out {
                if !budget.admits(&z) {
                    saturated = false;
                    continue;
                }
                let k = z.canonical();
                if store.insert(k) {
                    queue.push_back(k);
                    if store.len() > budget.max_statements {
                        saturated = false;
                        break 'run;
                    }
                }
            }
        }
    }

    Ok(Closure { statements: store.known.into_iter().collect(), saturated, iterations })
}
