//! Deduplicated multiway evolution graphs and proof-path queries.
//!
//! States are expanded breadth-first, one generation at a time. Identical
//! strings are merged into a single vertex no matter which branch produced
//! them. Vertices are numbered by `(generation, string)`, so two runs over the
//! same input produce the same graph regardless of how the frontier was
//! scheduled.

use std::collections::{HashMap, VecDeque};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rules::{apply_match, find_matches, RuleSystem};

pub type NodeId = usize;
pub type EdgeId = usize;

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;
pub const DEFAULT_PATH_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateNode {
    pub id: NodeId,
    pub string: String,
    pub generation: usize,
}

/// One rule application witnessing an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeWitness {
    /// Index into the graph's rule system.
    pub rule: usize,
    pub position: usize,
}

/// All one-step rewrites from `src` to `dst`, merged into one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub witnesses: Vec<EdgeWitness>,
}

/// How a generation's frontier is scheduled. The result never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveOptions {
    pub node_budget: usize,
    /// Worker threads for frontier expansion; 0 or 1 expands sequentially.
    pub threads: usize,
    /// Visit the frontier in a seeded random order instead of by id.
    pub shuffle_seed: Option<u64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            threads: 1,
            shuffle_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiwayGraph {
    system: RuleSystem,
    depth: usize,
    nodes: Vec<StateNode>,
    edges: Vec<RewriteEdge>,
    out_offsets: Vec<usize>,
    incoming: Vec<Vec<EdgeId>>,
    lookup: HashMap<String, NodeId>,
    layer_sizes: Vec<usize>,
}

/// Evolves `initial` for `generations` steps with default options.
pub fn evolve(initial: &[String], system: &RuleSystem, generations: usize) -> Result<MultiwayGraph> {
    evolve_with(initial, system, generations, &EvolveOptions::default())
}

type Expansion = Vec<(String, EdgeWitness)>;

fn expand(state: &str, system: &RuleSystem) -> Expansion {
    find_matches(state, system)
        .iter()
        .map(|site| {
            let next = apply_match(site, system).expect("find_matches yields valid sites");
            (
                next,
                EdgeWitness {
                    rule: site.rule,
                    position: site.position,
                },
            )
        })
        .collect()
}

fn expand_frontier(frontier: &[String], system: &RuleSystem, opts: &EvolveOptions) -> Vec<Expansion> {
    let mut order: Vec<usize> = (0..frontier.len()).collect();
    if let Some(seed) = opts.shuffle_seed {
        order.shuffle(&mut StdRng::seed_from_u64(seed));
    }
    let mut slots: Vec<Expansion> = vec![Vec::new(); frontier.len()];
    if opts.threads > 1 && frontier.len() > 1 {
        let results: Vec<(usize, Expansion)> = order.par_iter().map(|&i| (i, expand(&frontier[i], system))).collect();
        for (i, e) in results {
            slots[i] = e;
        }
    } else {
        for i in order {
            slots[i] = expand(&frontier[i], system);
        }
    }
    slots
}

/// Evolves the multiway system, recording every rewrite out of every state of
/// generation `< generations`.
pub fn evolve_with(
    initial: &[String],
    system: &RuleSystem,
    generations: usize,
    opts: &EvolveOptions,
) -> Result<MultiwayGraph> {
    if initial.is_empty() {
        return Err(Error::NoInitialStates);
    }
    let run = || build(initial, system, generations, opts);
    if opts.threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    } else {
        run()
    }
}

fn build(initial: &[String], system: &RuleSystem, generations: usize, opts: &EvolveOptions) -> Result<MultiwayGraph> {
    let mut first: Vec<String> = initial.to_vec();
    first.sort();
    first.dedup();

    let mut nodes: Vec<StateNode> = Vec::new();
    let mut lookup: HashMap<String, NodeId> = HashMap::new();
    let mut edges: Vec<RewriteEdge> = Vec::new();
    let mut layer_sizes = vec![first.len()];
    for s in first {
        lookup.insert(s.clone(), nodes.len());
        nodes.push(StateNode {
            id: nodes.len(),
            string: s,
            generation: 0,
        });
    }
    let over_budget = |nodes: usize, layer_sizes: &[usize], edges: usize| -> Result<()> {
        if nodes > opts.node_budget {
            Err(Error::NodeBudgetExceeded {
                limit: opts.node_budget,
                layer_sizes: layer_sizes.to_vec(),
                edges,
            })
        } else {
            Ok(())
        }
    };
    over_budget(nodes.len(), &layer_sizes, 0)?;

    let mut layer_start = 0;
    for generation in 0..generations {
        let layer_end = nodes.len();
        let frontier: Vec<String> = nodes[layer_start..layer_end].iter().map(|n| n.string.clone()).collect();
        let expansions = expand_frontier(&frontier, system, opts);

        let mut fresh: Vec<&str> = expansions
            .iter()
            .flatten()
            .map(|(s, _)| s.as_str())
            .filter(|s| !lookup.contains_key(*s))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        let fresh: Vec<String> = fresh.into_iter().map(str::to_owned).collect();
        layer_sizes.push(fresh.len());
        for s in fresh {
            lookup.insert(s.clone(), nodes.len());
            nodes.push(StateNode {
                id: nodes.len(),
                string: s,
                generation: generation + 1,
            });
        }

        for (offset, expansion) in expansions.into_iter().enumerate() {
            let src = layer_start + offset;
            let mut by_dst: Vec<(NodeId, EdgeWitness)> = expansion.into_iter().map(|(s, w)| (lookup[&s], w)).collect();
            by_dst.sort_unstable();
            for (dst, w) in by_dst {
                match edges.last_mut() {
                    Some(e) if e.src == src && e.dst == dst => e.witnesses.push(w),
                    _ => edges.push(RewriteEdge {
                        src,
                        dst,
                        witnesses: vec![w],
                    }),
                }
            }
        }
        over_budget(nodes.len(), &layer_sizes, edges.len())?;
        layer_start = layer_end;
        if layer_start == nodes.len() {
            // nothing new: later generations are empty
            layer_sizes.extend(std::iter::repeat_n(0, generations - generation - 1));
            break;
        }
    }
    Ok(MultiwayGraph::assemble(
        system.clone(),
        generations,
        nodes,
        edges,
        layer_sizes,
    ))
}

impl MultiwayGraph {
    fn assemble(
        system: RuleSystem,
        depth: usize,
        nodes: Vec<StateNode>,
        edges: Vec<RewriteEdge>,
        layer_sizes: Vec<usize>,
    ) -> Self {
        let n = nodes.len();
        let mut out_offsets = vec![0; n + 1];
        for e in &edges {
            out_offsets[e.src + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut incoming = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            incoming[e.dst].push(id);
        }
        let lookup = nodes.iter().map(|n| (n.string.clone(), n.id)).collect();
        MultiwayGraph {
            system,
            depth,
            nodes,
            edges,
            out_offsets,
            incoming,
            lookup,
            layer_sizes,
        }
    }

    /// Rebuilds a graph from explicit parts, checking every invariant that
    /// `evolve` guarantees. Used when importing exported graphs.
    pub fn from_parts(
        system: RuleSystem,
        depth: usize,
        nodes: Vec<StateNode>,
        mut edges: Vec<RewriteEdge>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::Graph(msg));
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return bad(format!("node ids must be dense, found {} at {i}", node.id));
            }
            if node.generation > depth {
                return bad(format!("node {i} lies beyond depth {depth}"));
            }
        }
        let mut seen = HashMap::new();
        for node in &nodes {
            if seen.insert(node.string.as_str(), node.id).is_some() {
                return bad(format!("state `{}` appears twice", node.string));
            }
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        for pair in edges.windows(2) {
            if (pair[0].src, pair[0].dst) == (pair[1].src, pair[1].dst) {
                return bad(format!("duplicate edge {} -> {}", pair[0].src, pair[0].dst));
            }
        }
        for e in &edges {
            if e.src >= nodes.len() || e.dst >= nodes.len() {
                return bad(format!("edge {} -> {} has a missing endpoint", e.src, e.dst));
            }
            if e.witnesses.is_empty() {
                return bad(format!("edge {} -> {} has no witnesses", e.src, e.dst));
            }
            for w in &e.witnesses {
                if w.rule >= system.len() {
                    return bad(format!("edge {} -> {} cites an unknown rule", e.src, e.dst));
                }
                let replay = crate::rules::rewrite_at(&nodes[e.src].string, w.rule, w.position, &system)
                    .map_err(|err| Error::Graph(err.to_string()))?;
                if replay != nodes[e.dst].string {
                    return bad(format!("edge {} -> {} does not replay", e.src, e.dst));
                }
            }
        }
        let mut layer_sizes = vec![0; depth + 1];
        for node in &nodes {
            layer_sizes[node.generation] += 1;
        }
        Ok(MultiwayGraph::assemble(system, depth, nodes, edges, layer_sizes))
    }

    pub fn system(&self) -> &RuleSystem {
        &self.system
    }

    /// Number of generations expanded.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[StateNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &StateNode {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[RewriteEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &RewriteEdge {
        &self.edges[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of states first reached at each generation `0..=depth`.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// Number of edges leaving each generation `0..depth`.
    pub fn edges_per_generation(&self) -> Vec<usize> {
        let mut counts = vec![0; self.depth];
        for e in &self.edges {
            counts[self.nodes[e.src].generation] += 1;
        }
        counts
    }

    pub fn id_of(&self, state: &str) -> Option<NodeId> {
        self.lookup.get(state).copied()
    }

    pub fn require(&self, state: &str) -> Result<NodeId> {
        self.id_of(state).ok_or_else(|| Error::UnknownState(state.to_owned()))
    }

    /// Outgoing edge ids of `node`, ascending by destination.
    pub fn out_edges(&self, node: NodeId) -> std::ops::Range<EdgeId> {
        self.out_offsets[node]..self.out_offsets[node + 1]
    }

    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.incoming[node]
    }

    pub fn find_edge(&self, src: NodeId, dst: NodeId) -> Option<EdgeId> {
        let range = self.out_edges(src);
        let slice = &self.edges[range.clone()];
        slice
            .binary_search_by_key(&dst, |e| e.dst)
            .ok()
            .map(|i| range.start + i)
    }

    /// True when the node's outgoing rewrites were recorded.
    pub fn is_expanded(&self, node: NodeId) -> bool {
        self.nodes[node].generation < self.depth
    }

    /// Rule ids witnessing an edge, in witness order, without repeats.
    pub fn edge_rule_ids(&self, edge: EdgeId) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for w in &self.edges[edge].witnesses {
            let id = self.system.rule(w.rule).id.as_str();
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids
    }

    /// Highest rule order among an edge's witnesses.
    pub fn edge_order(&self, edge: EdgeId) -> u32 {
        self.edges[edge]
            .witnesses
            .iter()
            .map(|w| self.system.rule(w.rule).order)
            .max()
            .unwrap_or(0)
    }
}

/// A directed edge chain; a proof of `nodes[0] ->* nodes[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProofPath {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl ProofPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("paths have at least one node")
    }

    pub fn states<'g>(&self, g: &'g MultiwayGraph) -> Vec<&'g str> {
        self.nodes.iter().map(|&n| g.node(n).string.as_str()).collect()
    }

    /// `s0 -[rule@pos]-> s1 ...`
    pub fn render(&self, g: &MultiwayGraph) -> String {
        let mut out = g.node(self.nodes[0]).string.clone();
        for (i, &e) in self.edges.iter().enumerate() {
            let labels: Vec<String> = g
                .edge(e)
                .witnesses
                .iter()
                .map(|w| format!("{}@{}", g.system().rule(w.rule).id, w.position))
                .collect();
            out.push_str(&format!(
                " -[{}]-> {}",
                labels.join(","),
                g.node(self.nodes[i + 1]).string
            ));
        }
        out
    }
}

/// Reflexive-transitive reachability `a ->* b`.
pub fn reachable(g: &MultiwayGraph, a: &str, b: &str) -> Result<bool> {
    let (a, b) = (g.require(a)?, g.require(b)?);
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([a]);
    seen[a] = true;
    while let Some(n) = queue.pop_front() {
        if n == b {
            return Ok(true);
        }
        for e in g.out_edges(n) {
            let d = g.edge(e).dst;
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    Ok(false)
}

/// All simple paths `a ->* b` of length at most `max_len`, in lexicographic
/// node-id order.
pub fn enumerate_paths(g: &MultiwayGraph, a: &str, b: &str, max_len: usize) -> Result<Vec<ProofPath>> {
    let (a, b) = (g.require(a)?, g.require(b)?);
    enumerate_paths_between(g, a, b, max_len, DEFAULT_PATH_BUDGET, |_| true)
}

/// Simple-path enumeration restricted to edges accepted by `allow`.
pub fn enumerate_paths_between(
    g: &MultiwayGraph,
    a: NodeId,
    b: NodeId,
    max_len: usize,
    budget: usize,
    allow: impl Fn(EdgeId) -> bool,
) -> Result<Vec<ProofPath>> {
    let mut found = Vec::new();
    let mut on_path = vec![false; g.node_count()];
    let mut nodes = vec![a];
    let mut edges = Vec::new();
    on_path[a] = true;

    // Explicit stack of out-edge iterators keeps deep searches off the call stack.
    let mut stack: Vec<std::ops::Range<EdgeId>> = Vec::new();
    if a == b {
        found.push(ProofPath {
            nodes: nodes.clone(),
            edges: Vec::new(),
        });
        return Ok(found);
    }
    if max_len > 0 {
        stack.push(g.out_edges(a));
    }
    while let Some(iter) = stack.last_mut() {
        let Some(e) = iter.next() else {
            stack.pop();
            if let Some(n) = nodes.pop() {
                on_path[n] = false;
            }
            edges.pop();
            continue;
        };
        if !allow(e) {
            continue;
        }
        let d = g.edge(e).dst;
        if on_path[d] {
            continue;
        }
        if d == b {
            if found.len() == budget {
                return Err(Error::PathBudgetExceeded { limit: budget });
            }
            let mut p_nodes = nodes.clone();
            p_nodes.push(d);
            let mut p_edges = edges.clone();
            p_edges.push(e);
            found.push(ProofPath {
                nodes: p_nodes,
                edges: p_edges,
            });
            continue;
        }
        if edges.len() + 1 < max_len {
            nodes.push(d);
            edges.push(e);
            on_path[d] = true;
            stack.push(g.out_edges(d));
        }
    }
    Ok(found)
}

/// Unordered pairs of distinct equal-length paths, from a path list already in
/// lexicographic order.
pub fn pair_up(paths: &[ProofPath]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if paths[i].len() == paths[j].len() {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// All unordered pairs of distinct equal-length proofs of `a ->* b`.
pub fn parallel_path_pairs(g: &MultiwayGraph, a: &str, b: &str, max_len: usize) -> Result<Vec<(ProofPath, ProofPath)>> {
    let paths = enumerate_paths(g, a, b, max_len)?;
    Ok(pair_up(&paths)
        .into_iter()
        .map(|(i, j)| (paths[i].clone(), paths[j].clone()))
        .collect())
}
