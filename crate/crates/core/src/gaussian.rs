//! Gaussian models generated from a regression graph, used as a numerical
//! oracle for independence statements.
//!
//! The context block comes from a concentration matrix with zeros at the
//! missing full lines. Response components are then added one at a time,
//! from the last in the ordering to the first, as linear regressions on
//! everything generated so far, with residual covariance zero at missing
//! dashed lines.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::to_text;
use crate::graph::RegressionGraph;
use crate::nodeset::{NodeId, NodeSet};
use crate::ordering::ComponentOrdering;
use crate::statement::{check, IndependenceStatement};

pub const DEFAULT_TOL: f64 = 1e-8;
/// Conditional covariances above this count as a dependence.
pub const DEPENDENCE_TOL: f64 = 1e-3;

const OFF_DIAGONAL: (f64, f64) = (0.1, 0.4);
const REGRESSION: (f64, f64) = (0.3, 0.8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// FNV-1a of the canonical text form of the graph, in hex.
    pub graph_hash: String,
    pub ordering: Vec<Vec<NodeId>>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    nodes: Vec<NodeId>,
    index: [usize; 65],
    sigma: DMatrix<f64>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct ModelDocument<'a> {
    nodes: &'a [NodeId],
    sigma: Vec<Vec<f64>>,
    provenance: &'a Provenance,
}

impl GaussianModel {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn covariance(&self, i: NodeId, j: NodeId) -> f64 {
        self.sigma[(self.index[i.get() as usize], self.index[j.get() as usize])]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.sigma.clone()).eigenvalues.min()
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.sigma - self.sigma.transpose()).amax()
    }

    fn indices(&self, s: NodeSet) -> Vec<usize> {
        s.iter().map(|n| self.index[n.get() as usize]).collect()
    }

    /// `{nodes, sigma, provenance}` with sigma as a list of rows.
    pub fn to_json(&self) -> String {
        let d = self.sigma.nrows();
        let doc = ModelDocument {
            nodes: &self.nodes,
            sigma: (0..d).map(|r| (0..d).map(|c| self.sigma[(r, c)]).collect()).collect(),
            provenance: &self.provenance,
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }
}

fn fnv1a(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn signed(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let v = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Symmetric matrix over `nodes` with random entries at the given pairs and
/// a diagonal of absolute row sum plus one, hence positive definite.
fn dominant(rng: &mut ChaCha8Rng, nodes: &[NodeId], linked: impl Fn(NodeId, NodeId) -> bool) -> DMatrix<f64> {
    let d = nodes.len();
    let mut m = DMatrix::zeros(d, d);
    for r in 0..d {
        for c in r + 1..d {
            if linked(nodes[r], nodes[c]) {
                let v = signed(rng, OFF_DIAGONAL);
                m[(r, c)] = v;
                m[(c, r)] = v;
            }
        }
    }
    for r in 0..d {
        m[(r, r)] = m.row(r).abs().sum() + 1.0;
    }
    m
}

pub fn generate_model(g: &RegressionGraph, ordering: &ComponentOrdering, seed: u64) -> Result<GaussianModel> {
    let part = g.resolve_partition()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // generated nodes in matrix order, starting with the context block
    let mut order: Vec<NodeId> = part.context.to_vec();
    let k = dominant(&mut rng, &order, |a, b| g.full_neighbors(a).contains(b));
    let mut sigma = match k.clone().cholesky() {
        Some(ch) if !order.is_empty() => ch.inverse(),
        Some(_) => DMatrix::zeros(0, 0),
        None => return Err(Error::Numerical("context concentration matrix is not positive definite".into())),
    };

    for &comp in ordering.components().iter().rev() {
        if comp.is_subset(part.context) {
            continue;
        }
        let q = comp.to_vec();
        let p = order.len();
        let mut b = DMatrix::zeros(q.len(), p);
        for (r, &i) in q.iter().enumerate() {
            let parents = g.parents_of(i);
            for (c, &j) in order.iter().enumerate() {
                if parents.contains(j) {
                    b[(r, c)] = signed(&mut rng, REGRESSION);
                }
            }
        }
        let lambda = dominant(&mut rng, &q, |a, b| g.dashed_neighbors(a).contains(b));
        let qp = &b * &sigma;
        let qq = &qp * b.transpose() + lambda;

        let d = p + q.len();
        let mut next = DMatrix::zeros(d, d);
        next.view_mut((0, 0), (p, p)).copy_from(&sigma);
        next.view_mut((p, 0), (q.len(), p)).copy_from(&qp);
        next.view_mut((0, p), (p, q.len())).copy_from(&qp.transpose());
        next.view_mut((p, p), (q.len(), q.len())).copy_from(&qq);
        sigma = next;
        order.extend(q);
    }

    // permute into ascending node order
    let nodes = g.nodes().to_vec();
    let mut pos = [usize::MAX; 65];
    for (k, n) in order.iter().enumerate() {
        pos[n.get() as usize] = k;
    }
    let d = nodes.len();
    let sigma = DMatrix::from_fn(d, d, |r, c| sigma[(pos[nodes[r].get() as usize], pos[nodes[c].get() as usize])]);
    let sigma = (&sigma + sigma.transpose()) * 0.5;

    let mut index = [usize::MAX; 65];
    for (k, n) in nodes.iter().enumerate() {
        index[n.get() as usize] = k;
    }
    Ok(GaussianModel {
        nodes,
        index,
        sigma,
        provenance: Provenance { graph_hash: fnv1a(&to_text(g)), ordering: ordering.to_sequence(), seed },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiResult {
    pub holds: bool,
    pub max_abs: f64,
}

/// Largest entry of `Σ_AB − Σ_AC Σ_CC⁻¹ Σ_CB` against `tol`.
pub fn ci_holds(m: &GaussianModel, a: NodeSet, b: NodeSet, c: NodeSet, tol: f64) -> Result<CiResult> {
    check(a, b, c)?;
    let known: NodeSet = m.nodes.iter().copied().collect();
    let outside = a.union(b).union(c).difference(known);
    if !outside.is_empty() {
        return Err(Error::UnknownNodes(outside));
    }
    let (ia, ib, ic) = (m.indices(a), m.indices(b), m.indices(c));
    let s_ab = m.sigma.select_rows(&ia).select_columns(&ib);
    let cross = if ic.is_empty() {
        s_ab
    } else {
        let s_cc = m.sigma.select_rows(&ic).select_columns(&ic);
        let s_cb = m.sigma.select_rows(&ic).select_columns(&ib);
        let s_ac = m.sigma.select_rows(&ia).select_columns(&ic);
        let chol = s_cc.cholesky().ok_or_else(|| Error::Numerical(format!("covariance of {{{c}}} is singular")))?;
        s_ab - s_ac * chol.solve(&s_cb)
    };
    let max_abs = cross.amax();
    Ok(CiResult { holds: max_abs < tol, max_abs })
}

#[derive(Debug, Clone, Serialize)]
pub struct StatementCheck {
    pub statement: IndependenceStatement,
    pub holds: bool,
    pub max_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianReport {
    pub total: usize,
    pub held: usize,
    pub checks: Vec<StatementCheck>,
}

impl GaussianReport {
    pub fn passed(&self) -> bool {
        self.held == self.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &StatementCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

pub fn verify_statements<'a>(
    m: &GaussianModel,
    statements: impl IntoIterator<Item = &'a IndependenceStatement>,
    tol: f64,
) -> Result<GaussianReport> {
    let mut checks = Vec::new();
    for &s in statements {
        let r = ci_holds(m, s.a(), s.b(), s.c(), tol)?;
        checks.push(StatementCheck { statement: s, holds: r.holds, max_abs: r.max_abs });
    }
    let held = checks.iter().filter(|c| c.holds).count();
    Ok(GaussianReport { total: checks.len(), held, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::ordering::valid_ordering;

    fn n(i: u32) -> NodeId {
        NodeId::new(i).unwrap()
    }

    fn model(g: &RegressionGraph, seed: u64) -> GaussianModel {
        generate_model(g, &valid_ordering(g).unwrap(), seed).unwrap()
    }

    #[test]
    fn full_line_gives_concentration_inverse() {
        let g = RegressionGraph::from_edges([Edge::full(n(1), n(2))]).unwrap();
        let m = model(&g, 3);
        let k = m.sigma().clone().try_inverse().unwrap();
        assert!(k[(0, 1)].abs() >= 0.1 - 1e-12);
        assert!(m.min_eigenvalue() > 0.0);
    }

    #[test]
    fn isolated_context_nodes_are_uncorrelated() {
        let g = RegressionGraph::new(NodeSet::of(&[1, 2]), vec![], None, NodeSet::EMPTY).unwrap();
        let m = model(&g, 0);
        assert_eq!(m.covariance(n(1), n(2)), 0.0);
        let r = ci_holds(&m, NodeSet::of(&[1]), NodeSet::of(&[2]), NodeSet::EMPTY, DEFAULT_TOL).unwrap();
        assert_eq!(r, CiResult { holds: true, max_abs: 0.0 });
    }

    #[test]
    fn arrow_induces_dependence() {
        let g = RegressionGraph::from_edges([Edge::arrow(n(2), n(1))]).unwrap();
        let m = model(&g, 11);
        let r = ci_holds(&m, NodeSet::of(&[1]), NodeSet::of(&[2]), NodeSet::EMPTY, DEFAULT_TOL).unwrap();
        assert!(!r.holds && r.max_abs > DEPENDENCE_TOL);
    }

    #[test]
    fn collider_by_dashed_lines() {
        // 1 ~~ 2 ~~ 3 with 1, 3 uncoupled: marginally independent only
        let g = RegressionGraph::from_edges([Edge::dashed(n(1), n(2)), Edge::dashed(n(2), n(3))]).unwrap();
        let m = model(&g, 5);
        let one = |i| NodeSet::of(&[i]);
        assert!(ci_holds(&m, one(1), one(3), NodeSet::EMPTY, DEFAULT_TOL).unwrap().holds);
        assert!(!ci_holds(&m, one(1), one(3), one(2), DEFAULT_TOL).unwrap().holds);
    }

    #[test]
    fn deterministic_and_exportable() {
        let g = RegressionGraph::from_edges([Edge::arrow(n(3), n(1)), Edge::full(n(3), n(4))]).unwrap();
        assert_eq!(model(&g, 9), model(&g, 9));
        assert_ne!(model(&g, 9).sigma(), model(&g, 10).sigma());
        let v: serde_json::Value = serde_json::from_str(&model(&g, 9).to_json()).unwrap();
        assert_eq!(v["sigma"].as_array().unwrap().len(), 3);
        assert_eq!(v["provenance"]["seed"], 9);
    }
}
