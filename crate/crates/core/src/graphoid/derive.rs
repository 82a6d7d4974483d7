use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::closure::{Budget, Premises, Store};
use super::{apply_oriented, both, Oriented, Rule, RuleSet};
use crate::statement::IndependenceStatement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub rule: Rule,
    pub premises: Vec<Oriented>,
    pub conclusion: Oriented,
}

/// Rule applications in dependency order. Premises of each step are either
/// given premises or conclusions of earlier steps, as oriented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ProofTrace {
    pub steps: Vec<ProofStep>,
}

impl ProofTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    /// Re-applies every step and checks that the last conclusion is `goal`
    /// up to symmetry. An empty trace replays when `goal` is a premise.
    pub fn replay(&self, premises: &[IndependenceStatement], goal: IndependenceStatement) -> Result<(), String> {
        let mut have: HashSet<Oriented> = premises.iter().map(|&p| Oriented::from(p)).collect();
        have.extend(premises.iter().map(|&p| Oriented::from(p).swapped()));
        for (k, step) in self.steps.iter().enumerate() {
            if let Some(p) = step.premises.iter().find(|p| !have.contains(p)) {
                return Err(format!("step {}: premise {p} not available", k + 1));
            }
            if !apply_oriented(step.rule, &step.premises).contains(&step.conclusion) {
                return Err(format!("step {}: {} does not yield {}", k + 1, step.rule, step.conclusion));
            }
            have.insert(step.conclusion);
        }
        let last = match self.steps.last() {
            Some(s) => s.conclusion.canonical(),
            None => return if premises.contains(&goal) { Ok(()) } else { Err("empty trace".into()) },
        };
        if last == goal {
            Ok(())
        } else {
            Err(format!("trace ends in {last}, not {goal}"))
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            let premises: Vec<String> = s.premises.iter().map(|p| format!("[{p}]")).collect();
            out.push_str(&format!("{:>3}. {:<14} {} => [{}]\n", k + 1, s.rule, premises.join(" + "), s.conclusion));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Found(ProofTrace),
    /// The closure saturated without reaching the goal.
    NotDerivable,
    /// The budget ran out first.
    Inconclusive,
}

#[derive(Clone, Copy)]
enum Origin {
    Given(Oriented),
    Derived(Rule, Premises, Oriented),
}

/// Breadth-first search over rule applications. Layer `k` holds the
/// statements first derivable with `k` nested applications; within a layer
/// statements are expanded in canonical order and the first derivation of
/// each statement is kept, so traces are reproducible.
pub fn derive(
    goal: IndependenceStatement,
    premises: &[IndependenceStatement],
    rules: RuleSet,
    budget: Budget,
) -> Derivation {
    let mut store = Store::default();
    let mut origin: HashMap<IndependenceStatement, Origin> = HashMap::new();
    let mut frontier: Vec<IndependenceStatement> = Vec::new();
    for &p in premises {
        if store.insert(p) {
            origin.insert(p, Origin::Given(p.into()));
            frontier.push(p);
        }
    }

    let mut pruned = false;
    let mut layers = 0;
    let mut out = Vec::new();
    while !origin.contains_key(&goal) {
        if layers >= budget.max_iterations {
            return Derivation::Inconclusive;
        }
        layers += 1;
        frontier.sort();
        let mut fresh: Vec<(IndependenceStatement, Origin)> = Vec::new();
        let mut fresh_keys = HashSet::new();
        for &s in &frontier {
            for o in both(s) {
                out.clear();
                store.consequences(o, rules, &mut out);
                for &(rule, prem, z) in &out {
                    if !budget.admits(&z) {
                        pruned = true;
                        continue;
                    }
                    let k = z.canonical();
                    if !store.contains(&k) && fresh_keys.insert(k) {
                        fresh.push((k, Origin::Derived(rule, prem, z)));
                    }
                }
            }
        }
        if fresh.is_empty() {
            return if pruned { Derivation::Inconclusive } else { Derivation::NotDerivable };
        }
        frontier.clear();
        for (k, o) in fresh {
            store.insert(k);
            origin.insert(k, o);
            frontier.push(k);
        }
        if store.len() > budget.max_statements && !origin.contains_key(&goal) {
            return Derivation::Inconclusive;
        }
    }

    let mut steps = Vec::new();
    let mut done = HashMap::new();
    emit(goal, &origin, &mut done, &mut steps);
    Derivation::Found(ProofTrace { steps })
}

/// Appends the steps deriving `s` after those of its premises, with a
/// symmetry step wherever a premise is used in the other orientation.
/// Returns the orientation in which `s` was obtained.
fn emit(
    s: IndependenceStatement,
    origin: &HashMap<IndependenceStatement, Origin>,
    done: &mut HashMap<IndependenceStatement, Oriented>,
    steps: &mut Vec<ProofStep>,
) -> Oriented {
    if let Some(&o) = done.get(&s) {
        return o;
    }
    let produced = match origin[&s] {
        Origin::Given(o) => o,
        Origin::Derived(rule, premises, conclusion) => {
            let premises = premises.to_vec();
            for &p in &premises {
                let have = emit(p.canonical(), origin, done, steps);
                if have != p && !steps.iter().any(|st| st.conclusion == p) {
                    steps.push(ProofStep { rule: Rule::Symmetry, premises: vec![have], conclusion: p });
                }
            }
            steps.push(ProofStep { rule, premises, conclusion });
            conclusion
        }
    };
    done.insert(s, produced);
    produced
}
