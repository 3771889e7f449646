//! JSON and DOT renderings of multiway graphs.
//!
//! Both formats are byte-stable: nodes are emitted by id, edges by
//! `(src, dst)`, and JSON keys in a fixed order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeWitness, MultiwayGraph, RewriteEdge, StateNode};
use crate::rules::{Rule, RuleSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub rules: Vec<Rule>,
    pub depth: usize,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub string: String,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: usize,
    pub dst: usize,
    pub witnesses: Vec<WitnessRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub rule: String,
    pub pos: usize,
}

impl GraphDocument {
    pub fn from_graph(g: &MultiwayGraph) -> Self {
        let system = g.system();
        GraphDocument {
            rules: system.rules().to_vec(),
            depth: g.depth(),
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    string: n.string.clone(),
                    generation: n.generation,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    src: e.src,
                    dst: e.dst,
                    witnesses: e
                        .witnesses
                        .iter()
                        .map(|w| WitnessRecord {
                            rule: system.rule(w.rule).id.clone(),
                            pos: w.position,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<MultiwayGraph> {
        let system = RuleSystem::new(self.rules)?;
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| StateNode {
                id: n.id,
                string: n.string,
                generation: n.generation,
            })
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            let mut witnesses = Vec::with_capacity(e.witnesses.len());
            for w in e.witnesses {
                let rule = system
                    .position(&w.rule)
                    .ok_or_else(|| Error::Graph(format!("unknown rule `{}`", w.rule)))?;
                witnesses.push(EdgeWitness { rule, position: w.pos });
            }
            edges.push(RewriteEdge {
                src: e.src,
                dst: e.dst,
                witnesses,
            });
        }
        MultiwayGraph::from_parts(system, self.depth, nodes, edges)
    }
}

pub fn graph_to_json(g: &MultiwayGraph) -> String {
    let mut out = serde_json::to_string_pretty(&GraphDocument::from_graph(g)).expect("graph documents serialize");
    out.push('\n');
    out
}

pub fn graph_from_json(text: &str) -> Result<MultiwayGraph> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Graph(e.to_string()))?;
    doc.into_graph()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz digraph; rung edges carry `order=k` and a distinct style.
pub fn graph_to_dot(g: &MultiwayGraph) -> String {
    let mut out = String::from("digraph multiway {\n  node [shape=box];\n");
    for n in g.nodes() {
        out.push_str(&format!(
            "  n{} [label=\"{}\", generation={}];\n",
            n.id,
            dot_escape(&n.string),
            n.generation
        ));
    }
    for (id, e) in g.edges().iter().enumerate() {
        let label = dot_escape(&g.edge_rule_ids(id).join(","));
        let order = g.edge_order(id);
        if order >= 2 {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{label}\", order={order}, color=purple, style=dashed];\n",
                e.src, e.dst
            ));
        } else {
            out.push_str(&format!("  n{} -> n{} [label=\"{label}\"];\n", e.src, e.dst));
        }
    }
    out.push_str("}\n");
    out
}
