//! Thin cubical cells over a multiway graph.
//!
//! A `k`-cell spans `k` directions. Its `2^k` corners are graph vertices and
//! every corner-to-corner side along an axis is a path whose edges all carry a
//! witness in that axis's direction. Identity sides are empty paths. Cells
//! carry no data beyond their boundary, so two cells are equal exactly when
//! their boundaries are.
//!
//! Corner `c` is the binary word of its axis coordinates: bit `j` set means
//! the corner sits at the far end of axis `j`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiwayGraph, NodeId};

/// A directed path used as one side of a cell; identities have no edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    pub src: NodeId,
    pub dst: NodeId,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn identity(node: NodeId) -> Self {
        Path {
            src: node,
            dst: node,
            edges: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn then(&self, next: &Path) -> Path {
        debug_assert_eq!(self.dst, next.src);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&next.edges);
        Path {
            src: self.src,
            dst: next.dst,
            edges,
        }
    }
}

/// Direction sets of every edge and per-direction adjacency.
pub struct View<'g> {
    pub g: &'g MultiwayGraph,
    edge_dirs: Vec<Vec<u32>>,
    out: HashMap<u32, Vec<Vec<(EdgeId, NodeId)>>>,
}

impl<'g> View<'g> {
    pub fn new(g: &'g MultiwayGraph) -> Self {
        let edge_dirs: Vec<Vec<u32>> = g
            .edges()
            .iter()
            .map(|e| {
                let mut d: Vec<u32> = e.witnesses.iter().map(|w| g.system().rule(w.rule).stratum()).collect();
                d.sort_unstable();
                d.dedup();
                d
            })
            .collect();
        let mut out: HashMap<u32, Vec<Vec<(EdgeId, NodeId)>>> = HashMap::new();
        for (id, dirs) in edge_dirs.iter().enumerate() {
            let e = g.edge(id);
            for &d in dirs {
                out.entry(d).or_insert_with(|| vec![Vec::new(); g.node_count()])[e.src].push((id, e.dst));
            }
        }
        View { g, edge_dirs, out }
    }

    pub fn has_dir(&self, edge: EdgeId, dir: u32) -> bool {
        self.edge_dirs[edge].contains(&dir)
    }

    pub fn edges_in(&self, dir: u32) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_dirs.len()).filter(move |&e| self.has_dir(e, dir))
    }

    pub fn out(&self, node: NodeId, dir: u32) -> &[(EdgeId, NodeId)] {
        self.out.get(&dir).map(|adj| adj[node].as_slice()).unwrap_or(&[])
    }

    /// Single-step sides from `src` to `dst` in direction `dir`.
    pub fn sides(&self, src: NodeId, dst: NodeId, dir: u32) -> Vec<Path> {
        let mut sides = Vec::new();
        if src == dst {
            sides.push(Path::identity(src));
        }
        if let Some(e) = self.g.find_edge(src, dst) {
            if self.has_dir(e, dir) {
                sides.push(Path {
                    src,
                    dst,
                    edges: vec![e],
                });
            }
        }
        sides
    }

    /// The edge `src -> dst` in `dir`, or the identity when `src == dst`.
    pub fn step(&self, src: NodeId, dst: NodeId, dir: u32) -> Option<Path> {
        if src == dst {
            return Some(Path::identity(src));
        }
        let e = self.g.find_edge(src, dst)?;
        self.has_dir(e, dir).then(|| Path {
            src,
            dst,
            edges: vec![e],
        })
    }

    pub fn path_valid(&self, path: &Path, dir: u32) -> bool {
        let mut at = path.src;
        for &e in &path.edges {
            let edge = self.g.edge(e);
            if edge.src != at || !self.has_dir(e, dir) {
                return false;
            }
            at = edge.dst;
        }
        at == path.dst
    }
}

/// Position of the side leaving corner `c` along `axis` in a `k`-cell.
pub(crate) fn side_index(k: usize, axis: usize, c: usize) -> usize {
    let low = c & ((1 << axis) - 1);
    let high = (c >> (axis + 1)) << axis;
    axis * (1 << (k - 1)) + (high | low)
}

/// Inserts bit `side` at position `axis` into a `(k-1)`-bit corner word.
fn insert_bit(c: usize, axis: usize, side: usize) -> usize {
    let low = c & ((1 << axis) - 1);
    let high = c >> axis;
    (high << (axis + 1)) | (side << axis) | low
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    /// Direction of each axis.
    pub dirs: Vec<u32>,
    pub corners: Vec<NodeId>,
    /// Sides grouped by axis, then by source corner (bit `axis` clear).
    pub sides: Vec<Path>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn side(&self, axis: usize, corner: usize) -> &Path {
        debug_assert_eq!(corner & (1 << axis), 0);
        &self.sides[side_index(self.dim(), axis, corner)]
    }

    /// A 0-cell.
    pub fn point(node: NodeId) -> Self {
        Cell {
            dirs: Vec::new(),
            corners: vec![node],
            sides: Vec::new(),
        }
    }

    fn from_fn(dirs: Vec<u32>, corners: Vec<NodeId>, mut side: impl FnMut(usize, usize) -> Path) -> Self {
        let k = dirs.len();
        let mut sides = vec![Path::identity(0); k * (1usize << k) / 2];
        for axis in 0..k {
            for c in (0..1usize << k).filter(|c| c & (1 << axis) == 0) {
                sides[side_index(k, axis, c)] = side(axis, c);
            }
        }
        Cell { dirs, corners, sides }
    }

    /// The face at `side` (0 = near, 1 = far) of `axis`.
    pub fn face(&self, axis: usize, side: usize) -> Cell {
        let k = self.dim();
        let mut dirs = self.dirs.clone();
        dirs.remove(axis);
        let corners = (0..1usize << (k - 1))
            .map(|c| self.corners[insert_bit(c, axis, side)])
            .collect();
        Cell::from_fn(dirs, corners, |a, c| {
            let full_axis = if a < axis { a } else { a + 1 };
            self.side(full_axis, insert_bit(c, axis, side)).clone()
        })
    }

    /// The cell that is constant along a new axis inserted at `axis`.
    pub fn identity_along(face: &Cell, axis: usize, dir: u32) -> Cell {
        let mut dirs = face.dirs.clone();
        dirs.insert(axis, dir);
        let k = dirs.len();
        let drop_bit = |c: usize| {
            let low = c & ((1 << axis) - 1);
            let high = (c >> (axis + 1)) << axis;
            high | low
        };
        let corners = (0..1usize << k).map(|c| face.corners[drop_bit(c)]).collect();
        Cell::from_fn(dirs, corners, |a, c| {
            if a == axis {
                Path::identity(face.corners[drop_bit(c)])
            } else {
                let inner = if a < axis { a } else { a - 1 };
                face.side(inner, drop_bit(c)).clone()
            }
        })
    }

    /// True when every side along some axis is an identity.
    pub fn is_degenerate(&self) -> bool {
        (0..self.dim()).any(|axis| self.axis_is_identity(axis))
    }

    pub fn axis_is_identity(&self, axis: usize) -> bool {
        (0..1usize << self.dim())
            .filter(|c| c & (1 << axis) == 0)
            .all(|c| self.side(axis, c).is_identity())
    }

    pub fn is_point_like(&self) -> bool {
        self.sides.iter().all(Path::is_identity)
    }

    /// Every side is a valid path between the right corners.
    pub fn is_boundary_complete(&self, view: &View<'_>) -> bool {
        let k = self.dim();
        (0..k).all(|axis| {
            (0..1usize << k).filter(|c| c & (1 << axis) == 0).all(|c| {
                let p = self.side(axis, c);
                p.src == self.corners[c]
                    && p.dst == self.corners[c | (1 << axis)]
                    && view.path_valid(p, self.dirs[axis])
            })
        })
    }

    /// Pastes `next` after `self` along `axis`; `None` unless the far face of
    /// `self` equals the near face of `next`.
    pub fn compose(&self, next: &Cell, axis: usize) -> Option<Cell> {
        if self.dirs != next.dirs || self.face(axis, 1) != next.face(axis, 0) {
            return None;
        }
        let k = self.dim();
        let corners = (0..1usize << k)
            .map(|c| {
                if c & (1 << axis) == 0 {
                    self.corners[c]
                } else {
                    next.corners[c]
                }
            })
            .collect();
        Some(Cell::from_fn(self.dirs.clone(), corners, |a, c| {
            if a == axis {
                self.side(axis, c).then(next.side(axis, c))
            } else if c & (1 << axis) == 0 {
                self.side(a, c).clone()
            } else {
                next.side(a, c).clone()
            }
        }))
    }
}

impl Cell {
    /// Whether pasting `next` after `self` along `axis` yields a
    /// boundary-complete cell, checked without building the composite.
    pub fn pastes_to_cell(&self, next: &Cell, axis: usize, view: &View<'_>) -> bool {
        if self.dirs != next.dirs {
            return false;
        }
        let k = self.dim();
        let bit = 1usize << axis;
        for c in (0..1usize << k).filter(|c| c & bit == 0) {
            if self.corners[c | bit] != next.corners[c] {
                return false;
            }
        }
        (0..k).all(|a| {
            (0..1usize << k).filter(|c| c & (1 << a) == 0).all(|c| {
                let dir = self.dirs[a];
                if a == axis {
                    let (p, q) = (self.side(a, c), next.side(a, c));
                    p.src == self.corners[c]
                        && p.dst == q.src
                        && q.dst == next.corners[c | bit]
                        && view.path_valid(p, dir)
                        && view.path_valid(q, dir)
                } else {
                    let (owner, p) = if c & bit == 0 {
                        (self, self.side(a, c))
                    } else {
                        (next, next.side(a, c))
                    };
                    p.src == owner.corners[c] && p.dst == owner.corners[c | (1 << a)] && view.path_valid(p, dir)
                }
            })
        })
    }
}

/// All boundary-complete single-step `dirs.len()`-cells. With
/// `include_degenerate`, only the all-identity cells are skipped; otherwise
/// cells that are constant along any axis are skipped too.
pub fn enumerate_cells(view: &View<'_>, dirs: &[u32], include_degenerate: bool, budget: usize) -> Result<Vec<Cell>> {
    let k = dirs.len();
    let mut search = Search {
        view,
        dirs,
        k,
        corners: vec![0; 1 << k],
        sides: vec![Path::identity(0); k * (1usize << k) / 2],
        include_degenerate,
        budget,
        found: Vec::new(),
    };
    for start in 0..view.g.node_count() {
        search.corners[0] = start;
        search.corner(1)?;
    }
    Ok(search.found)
}

struct Search<'a, 'g> {
    view: &'a View<'g>,
    dirs: &'a [u32],
    k: usize,
    corners: Vec<NodeId>,
    sides: Vec<Path>,
    include_degenerate: bool,
    budget: usize,
    found: Vec<Cell>,
}

impl Search<'_, '_> {
    fn corner(&mut self, c: usize) -> Result<()> {
        if c == 1 << self.k {
            return self.finish();
        }
        let axis = c.trailing_zeros() as usize;
        let parent = c ^ (1 << axis);
        let from = self.corners[parent];
        let dir = self.dirs[axis];
        let mut options = vec![Path::identity(from)];
        options.extend(self.view.out(from, dir).iter().map(|&(e, dst)| Path {
            src: from,
            dst,
            edges: vec![e],
        }));
        for side in options {
            self.corners[c] = side.dst;
            self.sides[side_index(self.k, axis, parent)] = side;
            self.other_sides(c, axis + 1)?;
        }
        Ok(())
    }

    /// Fills the remaining sides entering corner `c`, from axes `>= axis`.
    fn other_sides(&mut self, c: usize, axis: usize) -> Result<()> {
        if axis == self.k {
            return self.corner(c + 1);
        }
        if c & (1 << axis) == 0 {
            return self.other_sides(c, axis + 1);
        }
        let parent = c ^ (1 << axis);
        for side in self.view.sides(self.corners[parent], self.corners[c], self.dirs[axis]) {
            self.sides[side_index(self.k, axis, parent)] = side;
            self.other_sides(c, axis + 1)?;
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        let cell = Cell {
            dirs: self.dirs.to_vec(),
            corners: self.corners.clone(),
            sides: self.sides.clone(),
        };
        let keep = if self.include_degenerate {
            !cell.is_point_like()
        } else {
            !cell.is_degenerate()
        };
        if keep {
            if self.found.len() == self.budget {
                return Err(Error::CellBudgetExceeded {
                    limit: self.budget,
                    dimension: self.k,
                });
            }
            self.found.push(cell);
        }
        Ok(())
    }
}

/// Classification of a square by its two horizontal sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareKind {
    /// All four sides are edges.
    Full,
    /// Exactly one side is an identity.
    Triangle,
    /// Constant along one axis: the identity square of an edge.
    Identity,
    /// Any other partially degenerate square.
    Degenerate,
}

/// A 2-cell viewed as the commuting square
///
/// ```text
///   a --f--> c
///   |        |
///   l        m
///   v        v
///   b --g--> d
/// ```
///
/// with vertical sides `l`, `m` and horizontal sides `f`, `g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Square {
    pub a: NodeId,
    pub b: NodeId,
    pub c: NodeId,
    pub d: NodeId,
    pub l: Path,
    pub m: Path,
    pub f: Path,
    pub g: Path,
}

impl Square {
    pub fn from_cell(cell: &Cell) -> Self {
        assert_eq!(cell.dim(), 2, "squares are 2-cells");
        Square {
            a: cell.corners[0],
            b: cell.corners[1],
            c: cell.corners[2],
            d: cell.corners[3],
            l: cell.side(0, 0).clone(),
            m: cell.side(0, 2).clone(),
            f: cell.side(1, 0).clone(),
            g: cell.side(1, 1).clone(),
        }
    }

    pub fn kind(&self) -> SquareKind {
        let ids = [&self.l, &self.m, &self.f, &self.g]
            .iter()
            .filter(|p| p.is_identity())
            .count();
        let vertical_identity = self.l.is_identity() && self.m.is_identity();
        let horizontal_identity = self.f.is_identity() && self.g.is_identity();
        match ids {
            0 => SquareKind::Full,
            1 => SquareKind::Triangle,
            _ if vertical_identity || horizontal_identity => SquareKind::Identity,
            _ => SquareKind::Degenerate,
        }
    }
}
