//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use regmark::format::parse_graph;
use regmark::graphoid::apply_rule;
use regmark::graphoid::Rule;
use regmark::random::{random_graph, EdgeDensities};
use regmark::{Edge, IndependenceStatement, NodeId, NodeSet, RegressionGraph, StatementSet};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> RegressionGraph {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_graph(&text).unwrap()
}

pub fn figure1() -> RegressionGraph {
    fixture("figure1.rg")
}

pub fn n(i: u32) -> NodeId {
    NodeId::new(i).unwrap()
}

pub fn set(ids: &[u32]) -> NodeSet {
    NodeSet::of(ids)
}

pub fn st(s: &str) -> IndependenceStatement {
    s.parse().unwrap()
}

/// `count` seeded graphs with node counts cycling through `2..=n_max` and
/// densities cycling through sparse to medium.
pub fn graph_batch(count: usize, n_max: usize, base_seed: u64) -> Vec<RegressionGraph> {
    (0..count)
        .map(|k| {
            let n = 2 + k % (n_max - 1);
            let density = [0.2, 0.35, 0.5][k % 3];
            random_graph(n, base_seed + k as u64, EdgeDensities::uniform(density))
        })
        .collect()
}

/// Nodes with a path to `target` made of full lines and arrows pointing
/// toward `target`, found by walking backwards. Includes `target`.
fn anterior_closure(g: &RegressionGraph, target: NodeSet) -> NodeSet {
    let mut reach = target;
    loop {
        let mut next = reach;
        for e in g.edges() {
            match *e {
                Edge::Arrow { tail, head } if reach.contains(head) => next.insert(tail),
                Edge::Full(a, b) if reach.contains(a) || reach.contains(b) => {
                    next.insert(a);
                    next.insert(b);
                }
                _ => {}
            }
        }
        if next == reach {
            return reach;
        }
        reach = next;
    }
}

/// Separation by enumerating every simple path between `a` and `b`.
pub fn brute_separated(g: &RegressionGraph, a: NodeId, b: NodeId, c: NodeSet) -> bool {
    let opening = anterior_closure(g, c);
    let mut path = vec![a];
    !any_open_path(g, b, c, opening, &mut path)
}

fn head_at(e: &Edge, n: NodeId) -> bool {
    match *e {
        Edge::Arrow { head, .. } => head == n,
        Edge::Dashed(..) => true,
        Edge::Full(..) => false,
    }
}

fn path_open(g: &RegressionGraph, path: &[NodeId], c: NodeSet, opening: NodeSet) -> bool {
    path.windows(3).all(|w| {
        let e1 = g.edge_between(w[0], w[1]).unwrap();
        let e2 = g.edge_between(w[1], w[2]).unwrap();
        if head_at(&e1, w[1]) && head_at(&e2, w[1]) {
            opening.contains(w[1])
        } else {
            !c.contains(w[1])
        }
    })
}

fn any_open_path(g: &RegressionGraph, b: NodeId, c: NodeSet, opening: NodeSet, path: &mut Vec<NodeId>) -> bool {
    let last = *path.last().unwrap();
    if last == b {
        return path_open(g, path, c, opening);
    }
    for next in g.nodes() {
        if path.contains(&next) || g.edge_between(last, next).is_none() {
            continue;
        }
        path.push(next);
        let found = any_open_path(g, b, c, opening, path);
        path.pop();
        if found {
            return true;
        }
    }
    false
}

/// Fixpoint of `apply_rule` applied to the whole set, one round at a time.
pub fn naive_closure(premises: &StatementSet) -> StatementSet {
    let mut all = premises.clone();
    loop {
        let list: Vec<_> = all.iter().copied().collect();
        let mut next = all.clone();
        for rule in Rule::ALL {
            next.extend(apply_rule(rule, &list));
        }
        if next.len() == all.len() {
            return all;
        }
        all = next;
    }
}
