//! Invariants checked on randomly generated small systems.

use std::collections::BTreeSet;

use multiway_core::rules::rewrite_at;
use multiway_core::verify::{Witness, WitnessArrow};
use multiway_core::*;
use rand::Rng;

use super::{brute_expand, OracleRule};

#[derive(Debug, Clone)]
pub struct Case {
    pub rules: Vec<OracleRule>,
    pub initial: Vec<String>,
    pub generations: usize,
}

fn word(rng: &mut impl Rng, letters: &[u8], min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| letters[rng.gen_range(0..letters.len())] as char)
        .collect()
}

/// Alphabet of at most 3 letters, 1 to 3 rules, at most 4 generations.
pub fn random_case(rng: &mut impl Rng) -> Case {
    let letters = &b"ABC"[..rng.gen_range(1..=3)];
    let rules = (0..rng.gen_range(1..=3))
        .map(|i| (format!("r{i}"), word(rng, letters, 1, 2), word(rng, letters, 0, 3), 0))
        .collect();
    let initial = (0..rng.gen_range(1..=2)).map(|_| word(rng, letters, 1, 4)).collect();
    Case {
        rules,
        initial,
        generations: rng.gen_range(0..=4),
    }
}

fn system_of(case: &Case) -> RuleSystem {
    RuleSystem::new(
        case.rules
            .iter()
            .map(|(id, l, r, o)| Rule::new(id.as_str(), l.as_str(), r.as_str()).with_order(*o))
            .collect(),
    )
    .expect("generated ids are unique")
}

fn acyclic(g: &MultiwayGraph) -> bool {
    let mut indegree = vec![0usize; g.node_count()];
    for e in g.edges() {
        indegree[e.dst] += 1;
    }
    let mut ready: Vec<NodeId> = (0..g.node_count()).filter(|&n| indegree[n] == 0).collect();
    let mut seen = 0;
    while let Some(n) = ready.pop() {
        seen += 1;
        for e in g.out_edges(n) {
            let dst = g.edge(e).dst;
            indegree[dst] -= 1;
            if indegree[dst] == 0 {
                ready.push(dst);
            }
        }
    }
    seen == g.node_count()
}

/// Counts of violations per property, in the order: coalgebra consistency,
/// length arithmetic, edge replay, conditional acyclicity, brute-force match.
pub fn violations(case: &Case) -> [usize; 5] {
    let mut v = [0; 5];
    let system = system_of(case);
    let g = evolve(&case.initial, &system, case.generations).expect("small cases fit the budget");

    for node in g.nodes() {
        let s = node.string.as_str();
        let matches = find_matches(s, &system);
        let via_matches: BTreeSet<(String, String)> = matches
            .iter()
            .map(|m| (system.rule(m.rule).id.clone(), apply_match(m, &system).unwrap()))
            .collect();
        if via_matches != successors(s, &system) {
            v[0] += 1;
        }
        if g.is_expanded(node.id) {
            let edges: BTreeSet<(String, String)> = g
                .out_edges(node.id)
                .flat_map(|e| {
                    let edge = g.edge(e);
                    edge.witnesses
                        .iter()
                        .map(|w| (system.rule(w.rule).id.clone(), g.node(edge.dst).string.clone()))
                        .collect::<Vec<_>>()
                })
                .collect();
            if edges != via_matches {
                v[0] += 1;
            }
        }
        for m in &matches {
            let rule = system.rule(m.rule);
            let out = apply_match(m, &system).unwrap();
            let expected = s.chars().count() - rule.lhs.chars().count() + rule.rhs.chars().count();
            if out.chars().count() != expected {
                v[1] += 1;
            }
        }
    }

    for e in g.edges() {
        for w in &e.witnesses {
            if rewrite_at(&g.node(e.src).string, w.rule, w.position, &system).as_deref()
                != Ok(g.node(e.dst).string.as_str())
            {
                v[2] += 1;
            }
        }
    }

    let increasing = system.rules().iter().all(|r| r.rhs.len() > r.lhs.len());
    if increasing && !acyclic(&g) {
        v[3] += 1;
    }

    let init: Vec<&str> = case.initial.iter().map(String::as_str).collect();
    let oracle = brute_expand(&init, &case.rules, case.generations);
    let nodes: BTreeSet<(String, usize)> = g.nodes().iter().map(|n| (n.string.clone(), n.generation)).collect();
    let expected: BTreeSet<(String, usize)> = oracle.generation.into_iter().collect();
    let edges: BTreeSet<(String, String)> = g
        .edges()
        .iter()
        .map(|e| (g.node(e.src).string.clone(), g.node(e.dst).string.clone()))
        .collect();
    if nodes != expected || edges != oracle.edges.into_keys().collect() {
        v[4] += 1;
    }
    v
}

fn replays(g: &MultiwayGraph, arrow: &WitnessArrow) -> bool {
    let system = g.system();
    let mut at = arrow.src.clone();
    for step in &arrow.steps {
        let Some(rule) = system.position(&step.rule) else {
            return false;
        };
        if step.src != at || rewrite_at(&at, rule, step.position, system).as_deref() != Ok(step.dst.as_str()) {
            return false;
        }
        at = step.dst.clone();
    }
    at == arrow.dst
}

/// Present arrows replay through `rewrite_at`; missing ones are really absent.
pub fn witness_replays(g: &MultiwayGraph, w: &Witness) -> bool {
    w.arrows.iter().all(|arrow| {
        if arrow.present {
            return replays(g, arrow);
        }
        let found = g
            .id_of(&arrow.src)
            .zip(g.id_of(&arrow.dst))
            .and_then(|(a, b)| g.find_edge(a, b))
            .is_some_and(|e| homotopy::edge_in_direction(g, e, arrow.direction));
        !found
    })
}
