//! Brute-force reference implementations used to cross-check the library.
//!
//! Nothing in this file calls into the library's rewriting, graph, path or
//! cell code; rules are plain `(id, lhs, rhs, order)` tuples over ASCII
//! strings. `props` holds the randomized property checks, which do.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};

pub type OracleRule = (String, String, String, u32);

pub fn rules_of(spec: &[(&str, &str, &str, u32)]) -> Vec<OracleRule> {
    spec.iter()
        .map(|&(id, l, r, o)| (id.to_owned(), l.to_owned(), r.to_owned(), o))
        .collect()
}

pub fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// All `(rule id, byte position, result)` one-step rewrites of `s`.
pub fn one_step(s: &str, rules: &[OracleRule]) -> Vec<(String, usize, String)> {
    let mut out = Vec::new();
    for (id, lhs, rhs, order) in rules {
        if *order >= 2 {
            if s == lhs {
                out.push((id.clone(), 0, rhs.clone()));
            }
            continue;
        }
        let (sb, lb) = (s.as_bytes(), lhs.as_bytes());
        if lb.len() > sb.len() {
            continue;
        }
        for i in 0..=sb.len() - lb.len() {
            if &sb[i..i + lb.len()] == lb {
                let mut t = String::with_capacity(s.len() + rhs.len());
                t.push_str(&s[..i]);
                t.push_str(rhs);
                t.push_str(&s[i + lb.len()..]);
                out.push((id.clone(), i, t));
            }
        }
    }
    out
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct OracleGraph {
    /// State to first generation it appears in.
    pub generation: BTreeMap<String, usize>,
    /// `(src, dst)` to the `(rule id, position)` witnesses of that step.
    pub edges: BTreeMap<(String, String), BTreeSet<(String, usize)>>,
    /// Directions of each edge: 1 for base rules, `k` for order-`k` rungs.
    pub dirs: BTreeMap<(String, String), BTreeSet<u32>>,
}

impl OracleGraph {
    pub fn layer_sizes(&self) -> Vec<usize> {
        let max = self.generation.values().copied().max().unwrap_or(0);
        let mut sizes = vec![0; max + 1];
        for &g in self.generation.values() {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn succ(&self, s: &str) -> Vec<&str> {
        self.edges
            .keys()
            .filter(|(a, _)| a == s)
            .map(|(_, b)| b.as_str())
            .collect()
    }

    pub fn has_dir(&self, a: &str, b: &str, dir: u32) -> bool {
        self.dirs
            .get(&(a.to_owned(), b.to_owned()))
            .is_some_and(|d| d.contains(&dir))
    }
}

/// Generation-by-generation expansion keeping only states not seen before.
pub fn brute_expand(initial: &[&str], rules: &[OracleRule], generations: usize) -> OracleGraph {
    let mut g = OracleGraph::default();
    let mut frontier: BTreeSet<String> = initial.iter().map(|s| s.to_string()).collect();
    for s in &frontier {
        g.generation.insert(s.clone(), 0);
    }
    for gen in 0..generations {
        let mut next = BTreeSet::new();
        for s in &frontier {
            for (id, pos, t) in one_step(s, rules) {
                let order = rules.iter().find(|r| r.0 == id).map(|r| r.3.max(1)).unwrap();
                g.edges.entry((s.clone(), t.clone())).or_default().insert((id, pos));
                g.dirs.entry((s.clone(), t.clone())).or_default().insert(order);
                if !g.generation.contains_key(&t) {
                    next.insert(t);
                }
            }
        }
        for t in &next {
            g.generation.insert(t.clone(), gen + 1);
        }
        frontier = next;
    }
    g
}

/// Simple paths from `a` to `b` with at most `max_len` edges, by plain
/// recursive DFS over edges accepted by `keep`.
pub fn dfs_paths(
    g: &OracleGraph,
    a: &str,
    b: &str,
    max_len: usize,
    keep: &dyn Fn(&str, &str) -> bool,
) -> Vec<Vec<String>> {
    fn go(
        g: &OracleGraph,
        path: &mut Vec<String>,
        b: &str,
        max_len: usize,
        keep: &dyn Fn(&str, &str) -> bool,
        out: &mut Vec<Vec<String>>,
    ) {
        let here = path.last().unwrap().clone();
        if here == b {
            out.push(path.clone());
            return;
        }
        if path.len() > max_len {
            return;
        }
        for next in g.succ(&here) {
            if !keep(&here, next) || path.iter().any(|p| p == next) {
                continue;
            }
            path.push(next.to_owned());
            go(g, path, b, max_len, keep, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    if g.generation.contains_key(a) {
        go(g, &mut vec![a.to_owned()], b, max_len, keep, &mut out);
    }
    out.sort();
    out
}

pub fn equal_length_pairs(paths: &[Vec<String>]) -> usize {
    let mut n = 0;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if paths[i].len() == paths[j].len() {
                n += 1;
            }
        }
    }
    n
}

/// `(lhs, rhs)` of all rungs between every equal-length pair, both ways.
pub fn rungs_between(paths: &[Vec<String>]) -> BTreeSet<(String, String)> {
    let mut rungs = BTreeSet::new();
    for p in paths {
        for q in paths {
            if p == q || p.len() != q.len() {
                continue;
            }
            for i in 1..p.len() - 1 {
                if p[i] != q[i] {
                    rungs.insert((p[i].clone(), q[i].clone()));
                }
            }
        }
    }
    rungs
}

/// One side of a cell: the identity, or the single edge between its corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Id,
    Edge,
}

fn side_options(g: &OracleGraph, a: &str, b: &str, dir: u32) -> Vec<Side> {
    let mut v = Vec::new();
    if a == b {
        v.push(Side::Id);
    }
    if g.has_dir(a, b, dir) {
        v.push(Side::Edge);
    }
    v
}

/// A square: corners `a, b, c, d` and sides `l: a->b`, `m: c->d` (vertical
/// direction) and `f: a->c`, `g: b->d` (horizontal direction).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleSquare {
    pub corners: [String; 4],
    pub l: Side,
    pub m: Side,
    pub f: Side,
    pub g: Side,
}

impl OracleSquare {
    pub fn identities(&self) -> usize {
        [self.l, self.m, self.f, self.g]
            .iter()
            .filter(|s| **s == Side::Id)
            .count()
    }
}

/// Every assignment of four states with matching sides, by scanning all
/// quadruples of states. Includes the all-identity squares.
pub fn brute_squares(g: &OracleGraph, vertical: u32, horizontal: u32) -> Vec<OracleSquare> {
    let states: Vec<&String> = g.generation.keys().collect();
    let mut out = Vec::new();
    for a in &states {
        for b in &states {
            let ls = side_options(g, a, b, vertical);
            if ls.is_empty() {
                continue;
            }
            for c in &states {
                let fs = side_options(g, a, c, horizontal);
                if fs.is_empty() {
                    continue;
                }
                for d in &states {
                    let ms = side_options(g, c, d, vertical);
                    let gs = side_options(g, b, d, horizontal);
                    for &l in &ls {
                        for &m in &ms {
                            for &f in &fs {
                                for &gg in &gs {
                                    out.push(OracleSquare {
                                        corners: [a.to_string(), b.to_string(), c.to_string(), d.to_string()],
                                        l,
                                        m,
                                        f,
                                        g: gg,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// A cube as a bottom square, a top square (both over directions 1, 2) and
/// four direction-3 sides joining matching corners.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleCube {
    pub bottom: OracleSquare,
    pub top: OracleSquare,
    pub up: [Side; 4],
}

impl OracleCube {
    fn constant_along(&self) -> [bool; 3] {
        let (b, t) = (&self.bottom, &self.top);
        [
            [b.l, b.m, t.l, t.m].iter().all(|s| *s == Side::Id),
            [b.f, b.g, t.f, t.g].iter().all(|s| *s == Side::Id),
            self.up.iter().all(|s| *s == Side::Id),
        ]
    }

    pub fn is_degenerate(&self) -> bool {
        self.constant_along().iter().any(|c| *c)
    }
}

/// Non-degenerate cubes over directions 1, 2, 3 by pairing squares.
pub fn brute_cubes(g: &OracleGraph) -> Vec<OracleCube> {
    let squares = brute_squares(g, 1, 2);
    let mut out = Vec::new();
    for bottom in &squares {
        for top in &squares {
            let ups: Vec<Vec<Side>> = (0..4)
                .map(|i| side_options(g, &bottom.corners[i], &top.corners[i], 3))
                .collect();
            if ups.iter().any(Vec::is_empty) {
                continue;
            }
            for &u0 in &ups[0] {
                for &u1 in &ups[1] {
                    for &u2 in &ups[2] {
                        for &u3 in &ups[3] {
                            let cube = OracleCube {
                                bottom: bottom.clone(),
                                top: top.clone(),
                                up: [u0, u1, u2, u3],
                            };
                            if !cube.is_degenerate() {
                                out.push(cube);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub const RED: [&str; 7] = ["AA", "AAB", "AABB", "AABBB", "ABABBB", "ABBABBB", "ABBBABBB"];
pub const YELLOW: [&str; 7] = ["AA", "ABA", "ABBA", "ABBBA", "ABBBAB", "ABBBABB", "ABBBABBB"];

/// The base rule plus the ten rungs relating the red and yellow proofs.
pub fn featured_rules() -> Vec<OracleRule> {
    let mut rules = rules_of(&[("r", "A", "AB", 1)]);
    for i in 1..6 {
        rules.push((format!("h{i}"), RED[i].to_owned(), YELLOW[i].to_owned(), 2));
        rules.push((format!("h{i}_inv"), YELLOW[i].to_owned(), RED[i].to_owned(), 2));
    }
    rules
}
