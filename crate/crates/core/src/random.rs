//! Seeded generator of valid regression graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, RegressionGraph};
use crate::nodeset::{NodeId, NodeSet, MAX_NODE};

/// Probability of each optional edge of a kind. Components always receive a
/// spanning tree of their line type first, so densities only add edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDensities {
    pub dashed: f64,
    pub full: f64,
    pub arrow: f64,
}

impl Default for EdgeDensities {
    fn default() -> Self {
        EdgeDensities { dashed: 0.5, full: 0.5, arrow: 0.5 }
    }
}

impl EdgeDensities {
    pub fn uniform(p: f64) -> Self {
        EdgeDensities { dashed: p, full: p, arrow: p }
    }
}

/// Samples a component partition and its order, fills lines inside the
/// components, and adds arrows only to earlier components from later ones.
/// Deterministic in `(n, seed, densities)`.
pub fn random_graph(n: usize, seed: u64, densities: EdgeDensities) -> RegressionGraph {
    assert!(n >= 1 && n <= MAX_NODE as usize, "node count must be in 1..=64");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<NodeId> = (1..=n as u32).map(|i| NodeId::new(i).unwrap()).collect();
    ids.shuffle(&mut rng);

    let n_context = rng.gen_range(0..=n / 2 + 1).min(n);
    let (responses, context) = ids.split_at(n - n_context);
    let response_blocks = split_blocks(responses, &mut rng);
    let context_blocks = split_blocks(context, &mut rng);

    let mut edges = Vec::new();
    for block in &response_blocks {
        connect(block, densities.dashed, &mut rng, &mut edges, Edge::dashed);
    }
    for block in &context_blocks {
        connect(block, densities.full, &mut rng, &mut edges, Edge::full);
    }

    let ordered: Vec<&Vec<NodeId>> = response_blocks.iter().chain(&context_blocks).collect();
    for (q, lower) in ordered.iter().enumerate().take(response_blocks.len()) {
        for higher in &ordered[q + 1..] {
            for &head in lower.iter() {
                for &tail in higher.iter() {
                    if rng.gen_bool(densities.arrow) {
                        edges.push(Edge::arrow(tail, head));
                    }
                }
            }
        }
    }

    let nodes: NodeSet = ids.iter().copied().collect();
    RegressionGraph::new(nodes, edges, None, NodeSet::EMPTY).expect("generated graph is well formed")
}

fn split_blocks(nodes: &[NodeId], rng: &mut ChaCha8Rng) -> Vec<Vec<NodeId>> {
    let mut blocks: Vec<Vec<NodeId>> = Vec::new();
    for &v in nodes {
        match blocks.last_mut() {
            Some(b) if rng.gen_bool(0.5) => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    blocks
}

fn connect(
    block: &[NodeId],
    density: f64,
    rng: &mut ChaCha8Rng,
    edges: &mut Vec<Edge>,
    make: fn(NodeId, NodeId) -> Edge,
) {
    let mut tree = Vec::new();
    for k in 1..block.len() {
        let parent = block[rng.gen_range(0..k)];
        tree.push((parent.min(block[k]), parent.max(block[k])));
        edges.push(make(parent, block[k]));
    }
    for (x, &a) in block.iter().enumerate() {
        for &b in &block[x + 1..] {
            let pair = (a.min(b), a.max(b));
            if !tree.contains(&pair) && rng.gen_bool(density) {
                edges.push(make(a, b));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let g = random_graph(1, 99, EdgeDensities::default());
        assert_eq!(g.node_count(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn seeded_graph_is_valid_and_deterministic() {
        let g = random_graph(6, 17, EdgeDensities::uniform(0.5));
        assert!(g.validate().is_empty());
        assert_eq!(g, random_graph(6, 17, EdgeDensities::uniform(0.5)));
    }
}
