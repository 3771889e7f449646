//! Homotopy rungs between parallel proofs.
//!
//! Two equal-length proofs of the same proposition are related vertex by
//! vertex: for every interior index where they differ, a whole-state rule maps
//! the state on one proof to the state on the other, together with its
//! inverse. Appending these rungs to the rule system and re-evolving adds the
//! bidirectional "ladder" edges between the two proofs.
//!
//! Higher orders repeat the construction one stratum up: order-`k` rungs are
//! synthesized between parallel paths built only from order-`(k-1)` rung
//! edges.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::graph::{
    enumerate_paths_between, evolve_with, pair_up, EdgeId, EvolveOptions, MultiwayGraph, NodeId, ProofPath,
    DEFAULT_NODE_BUDGET, DEFAULT_PATH_BUDGET,
};
use crate::rules::{format_rule, invert_system, parse_document, Rule, RuleSystem};

/// Rungs relating two parallel proofs, stored by their state sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomotopySpec {
    pub order: u32,
    pub source: Vec<String>,
    pub target: Vec<String>,
    /// Forward rung followed by its inverse, for each differing interior index.
    pub rungs: Vec<Rule>,
}

impl HomotopySpec {
    pub fn from_states(order: u32, source: Vec<String>, target: Vec<String>) -> Result<Self> {
        if order < 2 {
            return Err(Error::OrderTooLow(order));
        }
        if source.is_empty() || target.is_empty() || source[0] != target[0] || source.last() != target.last() {
            return Err(Error::EndpointMismatch);
        }
        if source.len() != target.len() {
            return Err(Error::LengthMismatch(source.len() - 1, target.len() - 1));
        }
        let mut rungs = Vec::new();
        for i in 1..source.len().saturating_sub(1) {
            if source[i] == target[i] {
                continue;
            }
            let id = format!("h{order}_{i}");
            let inv = format!("{id}_inv");
            rungs.push(Rule {
                id: id.clone(),
                lhs: source[i].clone(),
                rhs: target[i].clone(),
                order,
                inverse_of: Some(inv.clone()),
            });
            rungs.push(Rule {
                id: inv,
                lhs: target[i].clone(),
                rhs: source[i].clone(),
                order,
                inverse_of: Some(id),
            });
        }
        Ok(HomotopySpec {
            order,
            source,
            target,
            rungs,
        })
    }

    /// Path length shared by both proofs.
    pub fn len(&self) -> usize {
        self.source.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    pub fn forward_rungs(&self) -> impl Iterator<Item = &Rule> {
        self.rungs.iter().step_by(2)
    }

    /// `(lhs, rhs)` of every rung, inverses included.
    pub fn rung_set(&self) -> BTreeSet<(String, String)> {
        self.rungs.iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect()
    }
}

/// Rungs between two parallel proofs in `g`.
pub fn synthesize_rungs(g: &MultiwayGraph, p: &ProofPath, q: &ProofPath, order: u32) -> Result<HomotopySpec> {
    let states = |path: &ProofPath| path.states(g).into_iter().map(str::to_owned).collect();
    HomotopySpec::from_states(order, states(p), states(q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub order: u32,
    pub specs: Vec<HomotopySpec>,
}

/// A base system together with the homotopy layers added on top of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedSystem {
    base: RuleSystem,
    layers: Vec<Layer>,
    combined: RuleSystem,
}

impl ExtendedSystem {
    pub fn new(base: RuleSystem) -> Self {
        ExtendedSystem {
            combined: base.clone(),
            base,
            layers: Vec::new(),
        }
    }

    pub fn base(&self) -> &RuleSystem {
        &self.base
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn combined(&self) -> &RuleSystem {
        &self.combined
    }

    pub fn max_order(&self) -> u32 {
        let declared = self.layers.iter().map(|l| l.order).max().unwrap_or(1);
        declared.max(self.combined.max_order())
    }

    pub fn specs(&self, order: u32) -> &[HomotopySpec] {
        self.layers
            .iter()
            .find(|l| l.order == order)
            .map(|l| l.specs.as_slice())
            .unwrap_or(&[])
    }

    /// Number of rules of the given order in the combined system.
    pub fn rule_count(&self, order: u32) -> usize {
        self.combined.rules().iter().filter(|r| r.order == order).count()
    }

    /// The same declared structure with one rule deleted from the combined
    /// system. Inverse links pointing at the deleted rule are dropped.
    pub fn without_rule(&self, id: &str) -> Result<Self> {
        let strip = |system: &RuleSystem| {
            let rules = system
                .rules()
                .iter()
                .filter(|r| r.id != id)
                .cloned()
                .map(|mut r| {
                    if r.inverse_of.as_deref() == Some(id) {
                        r.inverse_of = None;
                    }
                    r
                })
                .collect();
            RuleSystem::new(rules)
        };
        Ok(ExtendedSystem {
            base: strip(&self.base)?,
            layers: self.layers.clone(),
            combined: strip(&self.combined)?,
        })
    }

    /// The same layers over `invert_system(base)`.
    pub fn with_inverted_base(&self) -> Result<Self> {
        let base = invert_system(&self.base)?;
        let mut rules = base.rules().to_vec();
        rules.extend(self.combined.rules().iter().filter(|r| r.is_rung()).cloned());
        Ok(ExtendedSystem {
            combined: RuleSystem::new(rules)?,
            base,
            layers: self.layers.clone(),
        })
    }

    /// Rules-file rendering: base rules, then per order an `@order k` line,
    /// the layer's `@spec` lines, and its rungs.
    pub fn to_rules_text(&self) -> String {
        let mut out = String::new();
        let mut orders: BTreeSet<u32> = self.layers.iter().map(|l| l.order).collect();
        orders.extend(self.combined.rules().iter().map(|r| r.order).filter(|&o| o >= 2));
        for rule in self.combined.rules().iter().filter(|r| r.order < 2) {
            out.push_str(&format_rule(rule));
            out.push('\n');
        }
        for order in orders {
            out.push_str(&format!("@order {order}\n"));
            for spec in self.specs(order) {
                out.push_str(&format!(
                    "@spec {} | {}\n",
                    spec.source.join(" "),
                    spec.target.join(" ")
                ));
            }
            for rule in self.combined.rules().iter().filter(|r| r.order == order) {
                out.push_str(&format_rule(rule));
                out.push('\n');
            }
        }
        out
    }

    /// Reads the format written by [`ExtendedSystem::to_rules_text`]. Rungs are
    /// taken verbatim from the file; `@spec` lines rebuild the declared layers.
    pub fn from_rules_text(text: &str) -> Result<Self> {
        let doc = parse_document(text)?;
        let invalid = |line: usize, e: Error| -> Error {
            ParseError {
                line,
                kind: ParseErrorKind::Invalid(e.to_string()),
            }
            .into()
        };
        let base: Vec<Rule> = doc.rules.iter().filter(|r| r.order == 0).cloned().collect();
        let base = RuleSystem::new(base).map_err(|e| invalid(0, e))?;
        let combined = RuleSystem::new(doc.rules).map_err(|e| invalid(0, e))?;
        let mut layers: Vec<Layer> = Vec::new();
        for directive in doc.specs {
            let spec = HomotopySpec::from_states(directive.order, directive.source, directive.target)
                .map_err(|e| invalid(directive.line, e))?;
            match layers.iter_mut().find(|l| l.order == spec.order) {
                Some(layer) => layer.specs.push(spec),
                None => layers.push(Layer {
                    order: spec.order,
                    specs: vec![spec],
                }),
            }
        }
        layers.sort_by_key(|l| l.order);
        Ok(ExtendedSystem { base, layers, combined })
    }
}

fn unused_id(base: &str, taken: &HashSet<String>) -> String {
    if !taken.contains(base) && !taken.contains(&format!("{base}_inv")) {
        return base.to_owned();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|id| !taken.contains(id) && !taken.contains(&format!("{id}_inv")))
        .expect("unbounded id search")
}

/// Appends a spec's rungs to the combined system. Rungs already present with
/// the same `(lhs, rhs, order)` are merged; clashing ids get a numeric suffix.
pub fn extend_system(es: &ExtendedSystem, spec: &HomotopySpec) -> Result<ExtendedSystem> {
    let max_order = es.max_order();
    if spec.order > max_order + 1 {
        return Err(Error::OrderGap {
            order: spec.order,
            max_order,
        });
    }
    if spec.is_empty() {
        return Ok(es.clone());
    }

    let mut present: HashMap<(&str, &str, u32), usize> = HashMap::new();
    for (i, r) in es.combined.rules().iter().enumerate() {
        present.entry((r.lhs.as_str(), r.rhs.as_str(), r.order)).or_insert(i);
    }
    let mut taken: HashSet<String> = es.combined.rules().iter().map(|r| r.id.clone()).collect();
    let mut patched: Vec<(usize, String)> = Vec::new();
    let mut fresh: Vec<Rule> = Vec::new();

    for pair in spec.rungs.chunks(2) {
        let [fwd, inv] = pair else {
            unreachable!("rungs come in pairs")
        };
        let key = |r: &Rule| (r.lhs.clone(), r.rhs.clone(), r.order);
        let have_fwd = present.get(&(fwd.lhs.as_str(), fwd.rhs.as_str(), fwd.order)).copied();
        let have_inv = present.get(&(inv.lhs.as_str(), inv.rhs.as_str(), inv.order)).copied();
        let already = |r: &Rule| fresh.iter().any(|f| key(f) == key(r));
        match (have_fwd, have_inv) {
            (Some(_), Some(_)) => {}
            (None, None) => {
                if already(fwd) {
                    continue;
                }
                let id = unused_id(&fwd.id, &taken);
                let inv_id = format!("{id}_inv");
                taken.insert(id.clone());
                taken.insert(inv_id.clone());
                fresh.push(Rule {
                    id: id.clone(),
                    inverse_of: Some(inv_id.clone()),
                    ..fwd.clone()
                });
                fresh.push(Rule {
                    id: inv_id,
                    inverse_of: Some(id),
                    ..inv.clone()
                });
            }
            (Some(i), None) | (None, Some(i)) => {
                let missing = if have_fwd.is_none() { fwd } else { inv };
                if already(missing) {
                    continue;
                }
                let existing = &es.combined.rules()[i];
                let id = unused_id(&missing.id, &taken);
                taken.insert(id.clone());
                if existing.inverse_of.is_none() {
                    patched.push((i, id.clone()));
                }
                let link = existing.inverse_of.is_none().then(|| existing.id.clone());
                fresh.push(Rule {
                    id,
                    inverse_of: link,
                    ..missing.clone()
                });
            }
        }
    }

    let mut rules = es.combined.rules().to_vec();
    for (i, id) in patched {
        rules[i].inverse_of = Some(id);
    }
    let split = rules.iter().rposition(|r| r.order <= spec.order).map_or(0, |i| i + 1);
    rules.splice(split..split, fresh);
    let combined = RuleSystem::new(rules)?;

    let mut layers = es.layers.clone();
    let rung_set = spec.rung_set();
    match layers.iter_mut().find(|l| l.order == spec.order) {
        Some(layer) => {
            if !layer.specs.iter().any(|s| s.rung_set() == rung_set) {
                layer.specs.push(spec.clone());
            }
        }
        None => {
            layers.push(Layer {
                order: spec.order,
                specs: vec![spec.clone()],
            });
            layers.sort_by_key(|l| l.order);
        }
    }
    Ok(ExtendedSystem {
        base: es.base.clone(),
        layers,
        combined,
    })
}

/// Which parallel pairs get rungs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairPolicy {
    /// Only the lexicographically first and last proofs of the shortest
    /// length that has at least two.
    #[default]
    Extremal,
    /// Every unordered pair of distinct equal-length proofs.
    All,
}

impl std::str::FromStr for PairPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "extremal" => Ok(PairPolicy::Extremal),
            "all" => Ok(PairPolicy::All),
            other => Err(format!("unknown pair policy `{other}` (expected `extremal` or `all`)")),
        }
    }
}

/// Search bounds shared by graph construction, path enumeration and cell
/// enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub generations: usize,
    pub max_len: usize,
    pub node_budget: usize,
    pub path_budget: usize,
    pub cell_budget: usize,
    pub threads: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            generations: 8,
            max_len: 8,
            node_budget: DEFAULT_NODE_BUDGET,
            path_budget: DEFAULT_PATH_BUDGET,
            cell_budget: crate::verify::DEFAULT_CELL_BUDGET,
            threads: 1,
        }
    }
}

impl Limits {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            node_budget: self.node_budget,
            threads: self.threads,
            shuffle_seed: None,
        }
    }
}

fn select_pairs(paths: &[ProofPath], policy: PairPolicy) -> Vec<(usize, usize)> {
    match policy {
        PairPolicy::All => pair_up(paths),
        PairPolicy::Extremal => {
            let mut lengths: Vec<usize> = paths.iter().map(ProofPath::len).collect();
            lengths.sort_unstable();
            lengths.dedup();
            for len in lengths {
                let same: Vec<usize> = (0..paths.len()).filter(|&i| paths[i].len() == len).collect();
                if same.len() >= 2 {
                    return vec![(same[0], same[same.len() - 1])];
                }
            }
            Vec::new()
        }
    }
}

/// Specs from parallel pairs between each endpoint pair, deduplicated by rung
/// set, in endpoint-then-pair order. Returns the number of pairs considered.
fn synthesize_between(
    g: &MultiwayGraph,
    endpoints: &[(NodeId, NodeId)],
    allow: impl Fn(EdgeId) -> bool + Copy,
    policy: PairPolicy,
    order: u32,
    max_len: usize,
    path_budget: usize,
) -> Result<(usize, Vec<HomotopySpec>)> {
    let mut considered = 0;
    let mut specs: Vec<HomotopySpec> = Vec::new();
    let mut seen: HashSet<BTreeSet<(String, String)>> = HashSet::new();
    for &(u, v) in endpoints {
        let paths = enumerate_paths_between(g, u, v, max_len, path_budget, allow)?;
        for (i, j) in select_pairs(&paths, policy) {
            considered += 1;
            let spec = synthesize_rungs(g, &paths[i], &paths[j], order)?;
            if seen.insert(spec.rung_set()) {
                specs.push(spec);
            }
        }
    }
    Ok((considered, specs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutoHomotopy {
    /// Parallel pairs examined before rung-set deduplication.
    pub pairs: usize,
    pub specs: Vec<HomotopySpec>,
}

/// One spec for every parallel pair of proofs of `a ->* b`, deduplicated by
/// rung set.
pub fn auto_homotopy(g: &MultiwayGraph, a: &str, b: &str, max_len: usize, order: u32) -> Result<AutoHomotopy> {
    auto_homotopy_with(g, a, b, max_len, order, PairPolicy::All, DEFAULT_PATH_BUDGET)
}

pub fn auto_homotopy_with(
    g: &MultiwayGraph,
    a: &str,
    b: &str,
    max_len: usize,
    order: u32,
    policy: PairPolicy,
    path_budget: usize,
) -> Result<AutoHomotopy> {
    if order < 2 {
        return Err(Error::OrderTooLow(order));
    }
    let endpoints = [(g.require(a)?, g.require(b)?)];
    let (pairs, specs) = synthesize_between(g, &endpoints, |_| true, policy, order, max_len, path_budget)?;
    Ok(AutoHomotopy { pairs, specs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderStats {
    pub order: u32,
    pub endpoint_pairs: usize,
    pub parallel_pairs: usize,
    pub specs: usize,
    pub rungs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    pub system: ExtendedSystem,
    pub stats: Vec<OrderStats>,
    /// First order at which no parallel pairs existed before the target.
    pub inadmissible_at: Option<u32>,
}

/// True when the edge has a witness contributing to direction `dir`
/// (1 for base rules, `k` for order-`k` rungs).
pub fn edge_in_direction(g: &MultiwayGraph, edge: EdgeId, dir: u32) -> bool {
    g.edge(edge)
        .witnesses
        .iter()
        .any(|w| g.system().rule(w.rule).stratum() == dir)
}

/// Builds homotopy layers up to `target_order`.
///
/// Order 2 relates proofs of `a ->* b` made of base edges. Each later order
/// `k` relates parallel paths made only of order-`(k-1)` rung edges, between
/// every ordered pair of distinct vertices touched by such edges. The graph is
/// re-evolved from `a` under the current combined system before each order.
pub fn iterate_homotopy(
    es: &ExtendedSystem,
    a: &str,
    b: &str,
    target_order: u32,
    limits: &Limits,
    policy: PairPolicy,
) -> Result<Iteration> {
    if target_order < 2 {
        return Err(Error::OrderTooLow(target_order));
    }
    let mut system = es.clone();
    let mut stats = Vec::new();
    let mut inadmissible_at = None;
    for order in system.max_order() + 1..=target_order {
        let g = evolve_with(
            &[a.to_owned()],
            system.combined(),
            limits.generations,
            &limits.evolve_options(),
        )?;
        let below = order - 1;
        let allow = |e: EdgeId| edge_in_direction(&g, e, below);
        let endpoints: Vec<(NodeId, NodeId)> = if order == 2 {
            match (g.id_of(a), g.id_of(b)) {
                (Some(u), Some(v)) => vec![(u, v)],
                _ => Vec::new(),
            }
        } else {
            let mut touched: Vec<NodeId> = (0..g.edge_count())
                .filter(|&e| allow(e))
                .flat_map(|e| [g.edge(e).src, g.edge(e).dst])
                .collect();
            touched.sort_unstable();
            touched.dedup();
            touched
                .iter()
                .flat_map(|&u| touched.iter().filter(move |&&v| v != u).map(move |&v| (u, v)))
                .collect()
        };
        let (pairs, specs) =
            synthesize_between(&g, &endpoints, allow, policy, order, limits.max_len, limits.path_budget)?;
        let before = system.rule_count(order);
        for spec in &specs {
            system = extend_system(&system, spec)?;
        }
        stats.push(OrderStats {
            order,
            endpoint_pairs: endpoints.len(),
            parallel_pairs: pairs,
            specs: specs.len(),
            rungs: system.rule_count(order) - before,
        });
        if specs.is_empty() {
            if order < target_order {
                inadmissible_at = Some(order);
            }
            break;
        }
    }
    Ok(Iteration {
        system,
        stats,
        inadmissible_at,
    })
}
