//! Executable checks of the categorical structure of an extended system.
//!
//! Direction 1 carries base rewrites and direction `k` carries order-`k`
//! rungs. Squares over directions 1 and 2 form a thin double category; cells
//! over directions `1..=n` form a thin n-fold category. With inverses
//! adjoined, every direction should also be a groupoid.
//!
//! Cells are enumerated from single edges and identities only. Composites
//! are then formed by pasting and checked to stay well formed.

mod cells;
mod report;

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

pub use cells::{enumerate_cells, Cell, Path, Square, SquareKind, View};
pub use report::{
    CellCount, DirCount, LadderReport, LawResult, SquareCensus, Step, StructureReport, Witness, WitnessArrow,
    WitnessKind,
};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiwayGraph, NodeId};
use crate::homotopy::{ExtendedSystem, HomotopySpec};
use crate::rules::rewrite_at;

pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

struct Law {
    name: String,
    checked: usize,
    failures: usize,
    detail: String,
    witness: Option<Witness>,
}

impl Law {
    fn new(name: impl Into<String>) -> Self {
        Law {
            name: name.into(),
            checked: 0,
            failures: 0,
            detail: String::new(),
            witness: None,
        }
    }

    fn check(&mut self, ok: bool, fail: impl FnOnce() -> (String, Option<Witness>)) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.failures == 1 {
                let (detail, witness) = fail();
                self.detail = detail;
                self.witness = witness;
            }
        }
    }

    fn finish(self) -> LawResult {
        LawResult {
            name: self.name,
            passed: self.failures == 0,
            checked: self.checked,
            failures: self.failures,
            detail: self.detail,
            witness: self.witness,
        }
    }
}

fn morphism_counts(view: &View<'_>, max_dir: u32) -> Vec<DirCount> {
    (1..=max_dir)
        .map(|d| DirCount {
            direction: d,
            edges: view.edges_in(d).count(),
        })
        .collect()
}

fn index_by_face(cells: &[Cell], axis: usize, side: usize) -> HashMap<Cell, Vec<usize>> {
    let mut index: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        index.entry(c.face(axis, side)).or_default().push(i);
    }
    index
}

/// Pastes every composable pair along `axis` and checks the result.
fn composition_closure(view: &View<'_>, cells: &[Cell], axis: usize, law: &mut Law) {
    let by_near = index_by_face(cells, axis, 0);
    for first in cells {
        let Some(nexts) = by_near.get(&first.face(axis, 1)) else {
            continue;
        };
        for &j in nexts {
            law.check(first.pastes_to_cell(&cells[j], axis, view), || {
                (
                    format!("pasting along axis {axis} is not a cell"),
                    Some(Witness::from_cell(view.g, first)),
                )
            });
        }
    }
}

fn thinness(view: &View<'_>, cells: &[Cell], law: &mut Law) {
    let mut seen = HashSet::new();
    for cell in cells {
        law.check(seen.insert(cell), || {
            (
                "two cells share a boundary".into(),
                Some(Witness::from_cell(view.g, cell)),
            )
        });
    }
}

/// Outcome of building the squares along one declared homotopy.
struct Ladder {
    report: LadderReport,
    squares: Vec<Cell>,
    /// First square that could not be built, with its missing sides.
    broken: Option<Witness>,
}

/// Squares `P_i, P_{i+1}, Q_i, Q_{i+1}` with proof steps in direction
/// `order - 1` and rungs in direction `order`.
fn build_ladder(view: &View<'_>, spec: &HomotopySpec, index: usize, forward: bool) -> Ladder {
    let (p, q) = if forward {
        (&spec.source, &spec.target)
    } else {
        (&spec.target, &spec.source)
    };
    let (down, across) = (spec.order - 1, spec.order);
    let g = view.g;
    let mut report = LadderReport {
        order: spec.order,
        spec: index,
        forward,
        source: p.join(","),
        target: q.join(","),
        squares: p.len().saturating_sub(1),
        full: 0,
        degenerate: 0,
        complete: true,
    };
    let mut squares = Vec::new();
    let mut broken = None;
    for i in 0..report.squares {
        let corners = [&p[i], &p[i + 1], &q[i], &q[i + 1]];
        let sides = [(0, 1, down), (2, 3, down), (0, 2, across), (1, 3, across)];
        let ids: Vec<Option<NodeId>> = corners.iter().map(|s| g.id_of(s)).collect();
        let paths: Vec<Option<Path>> = sides
            .iter()
            .map(|&(a, b, dir)| match (ids[a], ids[b]) {
                (Some(x), Some(y)) => view.step(x, y, dir),
                _ => None,
            })
            .collect();
        if paths.iter().all(Option::is_some) {
            let paths: Vec<Path> = paths.into_iter().flatten().collect();
            let cell = Cell {
                dirs: vec![down, across],
                corners: ids.iter().flatten().copied().collect(),
                sides: paths,
            };
            match Square::from_cell(&cell).kind() {
                SquareKind::Full => report.full += 1,
                _ => report.degenerate += 1,
            }
            squares.push(cell);
            continue;
        }
        report.complete = false;
        if broken.is_none() {
            let arrows = sides
                .iter()
                .zip(&paths)
                .map(|(&(a, b, dir), path)| match path {
                    Some(path) => WitnessArrow::from_path(g, path, dir),
                    None => WitnessArrow::missing(dir, corners[a].as_str(), corners[b].as_str()),
                })
                .collect();
            broken = Some(Witness {
                kind: WitnessKind::Square,
                dirs: vec![down, across],
                corners: corners.iter().map(|s| s.to_string()).collect(),
                arrows,
            });
        }
    }
    Ladder {
        report,
        squares,
        broken,
    }
}

/// Embeds a ladder square over directions `(m-1, m)` into an `m`-cell that is
/// constant along directions `1..m-1`.
fn lift_witness(square: Witness, m: usize) -> Witness {
    if m <= 2 {
        return square;
    }
    let low = m - 2;
    let corners: Vec<String> = (0..1usize << m).map(|c| square.corners[c >> low].clone()).collect();
    let mut arrows = Vec::new();
    for axis in 0..m {
        for c in (0..1usize << m).filter(|c| c & (1 << axis) == 0) {
            if axis < low {
                let state = corners[c].clone();
                arrows.push(WitnessArrow {
                    direction: axis as u32 + 1,
                    src: state.clone(),
                    dst: state,
                    present: true,
                    steps: Vec::new(),
                });
            } else {
                arrows.push(square.arrows[cells::side_index(2, axis - low, c >> low)].clone());
            }
        }
    }
    Witness {
        kind: WitnessKind::for_dim(m),
        dirs: (1..=m as u32).collect(),
        corners,
        arrows,
    }
}

/// Builds both orientations of every declared order-`order` homotopy, checks
/// that each ladder pastes into a cell from proof to proof, and records the
/// outcome in `law`.
fn check_ladders(view: &View<'_>, es: &ExtendedSystem, order: u32, law: &mut Law, lift_to: usize) -> Vec<LadderReport> {
    let mut reports = Vec::new();
    for (index, spec) in es.specs(order).iter().enumerate() {
        for forward in [true, false] {
            let ladder = build_ladder(view, spec, index, forward);
            let broken = ladder.broken.clone().map(|w| lift_witness(w, lift_to));
            law.check(broken.is_none(), || {
                (
                    format!("declared order-{order} homotopy #{index} is missing rung edges"),
                    broken,
                )
            });
            if ladder.report.complete && !ladder.squares.is_empty() {
                let mut composite = ladder.squares[0].clone();
                let mut pasted = true;
                for sq in &ladder.squares[1..] {
                    match composite.compose(sq, 0) {
                        Some(c) => composite = c,
                        None => {
                            pasted = false;
                            break;
                        }
                    }
                }
                let ok = pasted
                    && composite.is_boundary_complete(view)
                    && composite.side(1, 0).is_identity()
                    && composite.side(1, 1).is_identity()
                    && composite.side(0, 0).edges.len() == spec.len()
                    && composite.side(0, 2).edges.len() == spec.len();
                law.check(ok, || {
                    (
                        format!("declared order-{order} homotopy #{index} does not paste to a cell"),
                        Some(Witness::from_cell(view.g, &composite)),
                    )
                });
            }
            reports.push(ladder.report);
        }
    }
    reports
}

/// Squares with base-edge vertical sides and rung or identity horizontal
/// sides, one per boundary.
pub fn find_squares(es: &ExtendedSystem, g: &MultiwayGraph) -> Result<Vec<Square>> {
    let _ = es;
    let view = View::new(g);
    Ok(enumerate_cells(&view, &[1, 2], true, DEFAULT_CELL_BUDGET)?
        .iter()
        .map(Square::from_cell)
        .filter(|sq| !sq.l.is_identity() && !sq.m.is_identity())
        .collect())
}

/// Checks the thin double category over directions 1 and 2.
pub fn verify_double_category(es: &ExtendedSystem, g: &MultiwayGraph) -> Result<StructureReport> {
    verify_double_category_with(es, g, DEFAULT_CELL_BUDGET)
}

pub fn verify_double_category_with(
    es: &ExtendedSystem,
    g: &MultiwayGraph,
    cell_budget: usize,
) -> Result<StructureReport> {
    let view = View::new(g);
    let squares = enumerate_cells(&view, &[1, 2], true, cell_budget)?;
    let mut census = SquareCensus::default();
    for sq in &squares {
        census.add(&Square::from_cell(sq));
    }

    let mut vertical = Law::new("vertical_composition");
    composition_closure(&view, &squares, 0, &mut vertical);
    let ladders = check_ladders(&view, es, 2, &mut vertical, 2);

    let mut horizontal = Law::new("horizontal_composition");
    composition_closure(&view, &squares, 1, &mut horizontal);

    let identities = check_identities(&view, &squares);
    let mut assoc = check_associativity_interchange(&squares, cell_budget)?;
    thinness(&view, &squares, &mut assoc);

    let laws: Vec<LawResult> = [vertical, horizontal, identities, assoc]
        .into_iter()
        .map(Law::finish)
        .collect();
    let passed = laws.iter().all(|l| l.passed);
    Ok(StructureReport {
        order: 2,
        objects: g.node_count(),
        morphisms: morphism_counts(&view, 2),
        cells: vec![CellCount {
            dirs: vec![1, 2],
            count: squares.len(),
            with_degenerate: true,
        }],
        square_census: census,
        ladders,
        laws,
        groupoid: None,
        passed,
    })
}

fn edge_cell(g: &MultiwayGraph, e: EdgeId, dir: u32) -> Cell {
    let edge = g.edge(e);
    Cell {
        dirs: vec![dir],
        corners: vec![edge.src, edge.dst],
        sides: vec![Path {
            src: edge.src,
            dst: edge.dst,
            edges: vec![e],
        }],
    }
}

/// Identity squares exist for every edge, and pasting an identity square
/// onto any square leaves it unchanged.
fn check_identities(view: &View<'_>, squares: &[Cell]) -> Law {
    let mut law = Law::new("identities");
    let present: HashSet<&Cell> = squares.iter().collect();
    // identity square of a direction-d edge is constant along the other axis
    for (dir, other_axis, other_dir) in [(1u32, 1usize, 2u32), (2, 0, 1)] {
        for e in view.edges_in(dir) {
            let id = Cell::identity_along(&edge_cell(view.g, e, dir), other_axis, other_dir);
            law.check(present.contains(&id), || {
                (
                    format!("no identity square for a direction-{dir} edge"),
                    Some(Witness::from_cell(view.g, &id)),
                )
            });
        }
    }
    for sq in squares {
        for axis in 0..2 {
            let dir = sq.dirs[axis];
            let before = Cell::identity_along(&sq.face(axis, 0), axis, dir);
            let after = Cell::identity_along(&sq.face(axis, 1), axis, dir);
            let ok = before.compose(sq, axis).as_ref() == Some(sq) && sq.compose(&after, axis).as_ref() == Some(sq);
            law.check(ok, || {
                (
                    format!("identity is not a unit along axis {axis}"),
                    Some(Witness::from_cell(view.g, sq)),
                )
            });
        }
    }
    law
}

/// Associativity of both compositions and the interchange law on 2x2 grids.
fn check_associativity_interchange(squares: &[Cell], budget: usize) -> Result<Law> {
    let mut law = Law::new("associativity_interchange");
    let near = [index_by_face(squares, 0, 0), index_by_face(squares, 1, 0)];
    let nexts = |i: usize, axis: usize| -> &[usize] {
        near[axis]
            .get(&squares[i].face(axis, 1))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    };
    let spend = |law: &Law| {
        if law.checked > budget {
            Err(Error::CellBudgetExceeded {
                limit: budget,
                dimension: 2,
            })
        } else {
            Ok(())
        }
    };
    for axis in 0..2 {
        for i in 0..squares.len() {
            for &j in nexts(i, axis) {
                let ij = squares[i].compose(&squares[j], axis).expect("composable");
                for &k in nexts(j, axis) {
                    let left = ij.compose(&squares[k], axis);
                    let jk = squares[j].compose(&squares[k], axis).expect("composable");
                    let right = squares[i].compose(&jk, axis);
                    law.check(left.is_some() && left == right, || {
                        (format!("pasting along axis {axis} is not associative"), None)
                    });
                }
                spend(&law)?;
            }
        }
    }
    // top-left, bottom-left, top-right, bottom-right
    for tl in 0..squares.len() {
        for &bl in nexts(tl, 0) {
            for &tr in nexts(tl, 1) {
                for &br in nexts(bl, 1) {
                    if squares[tr].face(0, 1) != squares[br].face(0, 0) {
                        continue;
                    }
                    let rows = squares[tl]
                        .compose(&squares[tr], 1)
                        .zip(squares[bl].compose(&squares[br], 1))
                        .and_then(|(top, bottom)| top.compose(&bottom, 0));
                    let cols = squares[tl]
                        .compose(&squares[bl], 0)
                        .zip(squares[tr].compose(&squares[br], 0))
                        .and_then(|(left, right)| left.compose(&right, 1));
                    law.check(rows.is_some() && rows == cols, || {
                        ("interchange fails on a 2x2 grid".into(), None)
                    });
                }
            }
            spend(&law)?;
        }
    }
    Ok(law)
}

/// Checks that every direction up to `order` is a groupoid on the expanded
/// part of `g`: every edge into an expanded vertex has an opposite edge in the
/// same direction that replays the inverse rule.
pub fn verify_groupoid(es: &ExtendedSystem, g: &MultiwayGraph, order: u32) -> Result<StructureReport> {
    let _ = es;
    let view = View::new(g);
    let system = g.system();

    let mut inverses = Law::new("inverse_rules");
    let mut opposite = Law::new("opposite_edges");
    let mut round_trip = Law::new("round_trip");
    let mut symmetric = Law::new("reachability_symmetry");

    for (i, rule) in system.rules().iter().enumerate() {
        if rule.stratum() > order {
            continue;
        }
        let ok = system.inverse_index(i).is_some();
        inverses.check(ok, || {
            let used = (0..g.edge_count()).find(|&e| g.edge(e).witnesses.iter().any(|w| w.rule == i));
            let witness = used.map(|e| {
                let edge = g.edge(e);
                let back = WitnessArrow::missing(
                    rule.stratum(),
                    g.node(edge.dst).string.as_str(),
                    g.node(edge.src).string.as_str(),
                );
                Witness::edge(WitnessArrow::from_edge(g, e, rule.stratum()), Some(back))
            });
            (format!("rule {} has no inverse", rule.id), witness)
        });
    }

    let mut sub: DiGraph<(), ()> = DiGraph::with_capacity(g.node_count(), g.edge_count());
    let ix: Vec<_> = (0..g.node_count()).map(|_| sub.add_node(())).collect();
    for e in 0..g.edge_count() {
        let edge = g.edge(e);
        if (1..=order).any(|d| view.has_dir(e, d)) {
            sub.add_edge(ix[edge.src], ix[edge.dst], ());
        }
    }
    let mut component = vec![0usize; g.node_count()];
    for (c, members) in tarjan_scc(&sub).into_iter().enumerate() {
        for n in members {
            component[n.index()] = c;
        }
    }

    for e in 0..g.edge_count() {
        let edge = g.edge(e);
        if !g.is_expanded(edge.dst) {
            continue;
        }
        for dir in (1..=order).filter(|&d| view.has_dir(e, d)) {
            let back = view.step(edge.dst, edge.src, dir);
            opposite.check(back.is_some(), || {
                let missing =
                    WitnessArrow::missing(dir, g.node(edge.dst).string.as_str(), g.node(edge.src).string.as_str());
                (
                    format!(
                        "no direction-{dir} edge {} -> {}",
                        g.node(edge.dst).string,
                        g.node(edge.src).string
                    ),
                    Some(Witness::edge(WitnessArrow::from_edge(g, e, dir), Some(missing))),
                )
            });
            for w in edge.witnesses.iter().filter(|w| system.rule(w.rule).stratum() == dir) {
                let Some(inv) = system.inverse_index(w.rule) else {
                    continue;
                };
                let replay = rewrite_at(&g.node(edge.dst).string, inv, w.position, system);
                let ok = replay.as_deref().ok() == Some(g.node(edge.src).string.as_str());
                round_trip.check(ok, || {
                    (
                        format!("inverse of {} does not undo the step", system.rule(w.rule).id),
                        Some(Witness::edge(WitnessArrow::from_edge(g, e, dir), None)),
                    )
                });
            }
        }
        if (1..=order).any(|d| view.has_dir(e, d)) {
            symmetric.check(component[edge.src] == component[edge.dst], || {
                (
                    format!(
                        "{} is not reachable back from {}",
                        g.node(edge.src).string,
                        g.node(edge.dst).string
                    ),
                    Some(Witness::edge(
                        WitnessArrow::from_edge(g, e, view_dir(&view, e, order)),
                        None,
                    )),
                )
            });
        }
    }

    let laws: Vec<LawResult> = [inverses, opposite, round_trip, symmetric]
        .into_iter()
        .map(Law::finish)
        .collect();
    let passed = laws.iter().all(|l| l.passed);
    Ok(StructureReport {
        order,
        objects: g.node_count(),
        morphisms: morphism_counts(&view, order),
        cells: Vec::new(),
        square_census: SquareCensus::default(),
        ladders: Vec::new(),
        laws,
        groupoid: Some(passed),
        passed,
    })
}

fn view_dir(view: &View<'_>, e: EdgeId, order: u32) -> u32 {
    (1..=order).find(|&d| view.has_dir(e, d)).unwrap_or(1)
}

/// Checks the thin n-fold category over directions `1..=n`.
///
/// Includes the double-category checks, then for each `m` in `3..=n`:
/// declared order-`m` homotopies, faces of every non-degenerate `m`-cell, and
/// closure of `m`-cells under pasting along each axis.
pub fn verify_nfold(es: &ExtendedSystem, g: &MultiwayGraph, n: u32) -> Result<StructureReport> {
    verify_nfold_with(es, g, n, DEFAULT_CELL_BUDGET)
}

pub fn verify_nfold_with(
    es: &ExtendedSystem,
    g: &MultiwayGraph,
    n: u32,
    cell_budget: usize,
) -> Result<StructureReport> {
    if n < 2 {
        return Err(Error::OrderTooLow(n));
    }
    if n > es.max_order() {
        return Err(Error::OrderExceedsSystem {
            requested: n,
            max_order: es.max_order(),
        });
    }
    let mut report = verify_double_category_with(es, g, cell_budget)?;
    if n == 2 {
        return Ok(report);
    }
    let view = View::new(g);
    for m in 3..=n as usize {
        let dirs: Vec<u32> = (1..=m as u32).collect();
        let cells = enumerate_cells(&view, &dirs, false, cell_budget)?;

        // every face must itself be a cell made of single steps, including
        // the faces of the cells spanned by declared order-m homotopies
        let mut boundary = Law::new(format!("cells{m}_faces"));
        report
            .ladders
            .extend(check_ladders(&view, es, m as u32, &mut boundary, m));
        for cell in &cells {
            for axis in 0..m {
                for side in 0..2 {
                    let face = cell.face(axis, side);
                    let ok = face.is_boundary_complete(&view) && face.sides.iter().all(|p| p.edges.len() <= 1);
                    boundary.check(ok, || {
                        (
                            format!("face {side} along axis {axis} is not a cell"),
                            Some(Witness::from_cell(g, cell)),
                        )
                    });
                }
            }
        }

        let mut laws = vec![boundary];
        for (axis, dir) in dirs.iter().enumerate() {
            let mut law = Law::new(format!("cells{m}_composition_dir{dir}"));
            composition_closure(&view, &cells, axis, &mut law);
            laws.push(law);
        }
        let mut thin = Law::new(format!("cells{m}_thinness"));
        thinness(&view, &cells, &mut thin);
        laws.push(thin);

        report.cells.push(CellCount {
            dirs,
            count: cells.len(),
            with_degenerate: false,
        });
        report.laws.extend(laws.into_iter().map(Law::finish));
    }
    report.order = n;
    report.morphisms = morphism_counts(&view, n);
    report.passed = report.laws.iter().all(|l| l.passed);
    Ok(report)
}
