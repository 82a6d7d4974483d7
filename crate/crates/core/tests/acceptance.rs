//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_separated, figure1, graph_batch, n, set, st};
use regmark::gaussian::{ci_holds, generate_model, verify_statements, DEFAULT_TOL, DEPENDENCE_TOL};
use regmark::graphoid::{closure, derive, Budget, Derivation, RuleSet};
use regmark::markov::check_nesting;
use regmark::ordering::{valid_ordering_with, TieBreak};
use regmark::saturate::saturate;
use regmark::separation::verify_soundness;
use regmark::{
    m_separated, pair_sets, pairwise_statements, valid_ordering, ComponentOrdering, NodeSet, PairwiseProperty,
    PropertyRegistry, RegressionGraph,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

const P1_TO_P4: [PairwiseProperty; 4] = [
    PairwiseProperty::P1Past,
    PairwiseProperty::P2Anteriors,
    PairwiseProperty::P3JointParents,
    PairwiseProperty::P4ParentsOfLower { use_par_j: false },
];

/// The Smallest and Largest tie-break orderings, once if they coincide.
fn two_orderings(g: &RegressionGraph) -> Vec<ComponentOrdering> {
    let a = valid_ordering_with(g, TieBreak::Smallest).unwrap();
    let b = valid_ordering_with(g, TieBreak::Largest).unwrap();
    if a.node_order() == b.node_order() {
        vec![a]
    } else {
        vec![a, b]
    }
}

fn criterion_1() -> Outcome {
    let g = figure1();
    let ord = valid_ordering(&g).unwrap();
    let start = Instant::now();
    let sets = pair_sets(&g, &ord, n(2), n(4)).unwrap();
    let par2 = g.par(n(2)).unwrap();
    let elapsed = start.elapsed();
    let ok = sets.par == set(&[5, 6])
        && sets.ant == set(&[5, 6, 8, 9])
        && sets.pst == set(&[5, 6, 7, 8, 9])
        && par2 == set(&[5]);
    outcome(
        ok && elapsed < Duration::from_millis(1),
        format!("par={{{}}} ant={{{}}} pst={{{}}} par(2)={{{}}} in {elapsed:?}", sets.par, sets.ant, sets.pst, par2),
    )
}

fn criterion_2() -> Outcome {
    let g = figure1();
    let ord = valid_ordering(&g).unwrap();
    let expected = ["2|4|5,6,7,8,9", "2|4|5,6,8,9", "2|4|5,6", "2|4|5"];
    let mut ok = true;
    let mut found = Vec::new();
    for (p, want) in P1_TO_P4.iter().zip(expected) {
        let stmts = pairwise_statements(&g, &ord, p.strategy()).unwrap();
        let pair: Vec<_> = stmts.iter().filter(|s| s.a() == set(&[2]) && s.b() == set(&[4])).collect();
        ok &= pair.len() == 1 && *pair[0] == st(want);
        found.push(format!("{}: {}", p.name(), pair.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")));
    }
    outcome(ok, found.join("; "))
}

fn criterion_3() -> Outcome {
    let chains: [(&str, &str, &[&str]); 4] = [
        ("p1=>p2", "2|4|5,6,8,9", &["2|4|5,6,7,8,9", "4|7|5,6,8,9"]),
        ("p2=>p3", "2|4|5,6", &["2|8|5,6,9", "2|9|5,6,8", "2|6|5,8,9", "2|4|5,6,8,9"]),
        ("p3=>p4", "2|4|5", &["2|4|5,6", "2|9|5", "2|6|5,9"]),
        ("p4=>p1", "2|4|5,6,7,8,9", &["2|4|5", "2|6|5", "2|7|5", "2|8|5", "2|9|5"]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, goal, premises) in chains {
        let goal = st(goal);
        let premises: Vec<_> = premises.iter().map(|s| st(s)).collect();
        let start = Instant::now();
        let result = derive(goal, &premises, RuleSet::ALL, Budget::statements(10_000));
        let elapsed = start.elapsed();
        match result {
            Derivation::Found(trace) => {
                let replays = trace.replay(&premises, goal).is_ok();
                ok &= replays && elapsed < Duration::from_secs(5);
                let rules: Vec<_> = trace.rules().iter().map(|r| r.name()).collect();
                parts.push(format!("{label} [{}] {elapsed:?}", rules.join(",")));
            }
            other => {
                ok = false;
                parts.push(format!("{label} {other:?}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn theorem1_holds(g: &RegressionGraph) -> Result<usize, String> {
    let mut runs = 0;
    for ord in two_orderings(g) {
        let mut closures = Vec::new();
        for p in P1_TO_P4 {
            let stmts = pairwise_statements(g, &ord, p.strategy()).unwrap();
            let c = closure(&stmts, g.nodes(), RuleSet::ALL, Budget::default()).unwrap();
            if !c.saturated {
                return Err("closure not saturated".into());
            }
            closures.push(c.statements);
        }
        if closures.windows(2).any(|w| w[0] != w[1]) {
            let sizes: Vec<_> = closures.iter().map(|c| c.len()).collect();
            return Err(format!("closure sizes differ {sizes:?} for ordering {:?}", ord.to_sequence()));
        }
        runs += 1;
    }
    Ok(runs)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let small = graph_batch(200, 5, 4_000);
    let six: Vec<_> = (0..20)
        .map(|k| {
            regmark::random::random_graph(
                6,
                4_500 + k,
                regmark::random::EdgeDensities::uniform([0.2, 0.35, 0.5][k as usize % 3]),
            )
        })
        .collect();
    let mut runs = 0;
    for (k, g) in small.iter().chain(&six).enumerate() {
        match theorem1_holds(g) {
            Ok(r) => runs += r,
            Err(e) => return outcome(false, format!("graph {k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(600),
        format!("220 graphs, {runs} orderings, closures equal and saturated, {elapsed:.2?}"),
    )
}

fn criterion_5() -> Outcome {
    let registry = PropertyRegistry::with_builtin();
    let mut graphs = vec![figure1()];
    graphs.extend(graph_batch(200, 10, 5_000));
    let mut total = 0;
    let mut failures = 0;
    for g in &graphs {
        let ord = valid_ordering(g).unwrap();
        for p in registry.iter() {
            let r = verify_soundness(g, &ord, p).unwrap();
            total += r.total;
            failures += r.failures.len();
        }
    }
    outcome(failures == 0, format!("{} graphs, {total} statements, {failures} failures", graphs.len()))
}

fn criterion_6() -> Outcome {
    let registry = PropertyRegistry::with_builtin();
    let mut violations = 0;
    let mut statements = 0;
    let (mut connected, mut generic) = (0usize, 0usize);
    let mut separated_queries = 0;
    for (k, g) in graph_batch(100, 10, 6_000).iter().enumerate() {
        let ord = valid_ordering(g).unwrap();
        let models: Vec<_> = (0..3).map(|s| generate_model(g, &ord, 1_000 * k as u64 + s).unwrap()).collect();
        for m in &models {
            for p in registry.iter() {
                let stmts = pairwise_statements(g, &ord, p).unwrap();
                let r = verify_statements(m, &stmts, DEFAULT_TOL).unwrap();
                statements += r.total;
                violations += r.total - r.held;
            }
        }
        let nodes = g.nodes().to_vec();
        if nodes.len() < 2 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(60_000 + k as u64);
        for _ in 0..500 {
            let i = nodes[rng.gen_range(0..nodes.len())];
            let mut j = nodes[rng.gen_range(0..nodes.len())];
            while j == i {
                j = nodes[rng.gen_range(0..nodes.len())];
            }
            let c: NodeSet = nodes.iter().copied().filter(|&x| x != i && x != j && rng.gen_bool(0.4)).collect();
            let (a, b) = (NodeSet::singleton(i), NodeSet::singleton(j));
            let sep = m_separated(g, a, b, c).unwrap().separated;
            for m in &models {
                let r = ci_holds(m, a, b, c, DEFAULT_TOL).unwrap();
                if sep {
                    separated_queries += 1;
                    if r.max_abs >= DEFAULT_TOL {
                        violations += 1;
                    }
                } else {
                    connected += 1;
                    if r.max_abs > DEPENDENCE_TOL {
                        generic += 1;
                    }
                }
            }
        }
    }
    let rate = generic as f64 / connected.max(1) as f64;
    outcome(
        violations == 0 && rate >= 0.95,
        format!(
            "{statements} statement checks and {separated_queries} separated queries, {violations} violations; genericity {generic}/{connected} = {:.2}%",
            100.0 * rate
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut queries = 0;
    for (k, g) in graph_batch(100, 6, 7_000).iter().enumerate() {
        let nodes = g.nodes();
        for a in nodes {
            for b in nodes.iter().filter(|&b| b > a) {
                let rest = nodes.without(a).without(b);
                for c in rest.subsets() {
                    queries += 1;
                    let fast = m_separated(g, NodeSet::singleton(a), NodeSet::singleton(b), c).unwrap().separated;
                    if fast != brute_separated(g, a, b, c) {
                        return outcome(false, format!("graph {k}: disagreement on {a} | {b} | {c}"));
                    }
                }
            }
        }
    }
    outcome(true, format!("100 graphs, {queries} queries agree"))
}

fn criterion_8() -> Outcome {
    let g = figure1();
    let ord = valid_ordering(&g).unwrap();
    let sat = saturate(&g, &ord).unwrap();
    let valid = sat.validate().is_empty();
    let complete = sat.uncoupled_pairs().is_empty();
    let same_order = ComponentOrdering::new(&sat, ord.to_sequence()).is_ok()
        && valid_ordering(&sat).map(|o| o.components() == ord.components()).unwrap_or(false);
    let idempotent = saturate(&sat, &ord).map(|s| s == sat).unwrap_or(false);
    let empty = PropertyRegistry::with_builtin()
        .iter()
        .all(|p| pairwise_statements(&sat, &ord, p).map(|s| s.is_empty()).unwrap_or(false));
    outcome(
        valid && complete && same_order && idempotent && empty,
        format!(
            "valid={valid} uncoupled=0:{complete} ordering kept={same_order} idempotent={idempotent} no statements={empty}, {} edges",
            sat.edges().len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut graphs = graph_batch(200, 5, 4_000);
    graphs.extend((0..20).map(|k| {
        regmark::random::random_graph(
            6,
            4_500 + k,
            regmark::random::EdgeDensities::uniform([0.2, 0.35, 0.5][k as usize % 3]),
        )
    }));
    graphs.extend(graph_batch(200, 10, 5_000));
    graphs.extend(graph_batch(100, 10, 6_000));
    graphs.push(figure1());
    let mut pairs = 0;
    let mut violations = 0;
    for g in &graphs {
        for ord in two_orderings(g) {
            violations += check_nesting(g, &ord).unwrap().len();
            pairs += g.uncoupled_pairs().len();
        }
    }
    outcome(violations == 0, format!("{} graphs, {pairs} pair checks, {violations} violations", graphs.len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "Figure-1 pair sets", criterion_1),
        (2, "Figure-1 pairwise statements", criterion_2),
        (3, "derivation chains", criterion_3),
        (4, "closure equality of P1-P4", criterion_4),
        (5, "soundness by separation", criterion_5),
        (6, "Gaussian oracle agreement", criterion_6),
        (7, "separation vs path enumeration", criterion_7),
        (8, "saturation", criterion_8),
        (9, "conditioning-set nesting", criterion_9),
    ];
    // criterion 1 is timed, so it runs before the heavy ones start
    let first = criteria[0].2();
    let mut results = BTreeMap::new();
    results.insert(1, first);
    std::thread::scope(|s| {
        let handles: Vec<_> = criteria[1..].iter().map(|&(k, _, f)| (k, s.spawn(f))).collect();
        for (k, h) in handles {
            let r = h.join().unwrap_or_else(|_| outcome(false, "panicked"));
            results.insert(k, r);
        }
    });
    let mut failed = 0;
    for (k, name, _) in criteria {
        let r = &results[&k];
        println!("criterion {k} ({name}): {} - {}", if r.passed { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
