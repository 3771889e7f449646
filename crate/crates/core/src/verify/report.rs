use std::fmt::Write as _;

use serde::Serialize;

use super::cells::{Cell, Path, Square, SquareKind};
use crate::graph::{EdgeId, MultiwayGraph};

/// One rewrite step of a witness arrow, replayable with `rewrite_at`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub edge: EdgeId,
    pub src: String,
    pub dst: String,
    pub rule: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessArrow {
    pub direction: u32,
    pub src: String,
    pub dst: String,
    /// False when the arrow the law needs does not exist in the graph.
    pub present: bool,
    pub steps: Vec<Step>,
}

impl WitnessArrow {
    pub fn missing(direction: u32, src: impl Into<String>, dst: impl Into<String>) -> Self {
        WitnessArrow {
            direction,
            src: src.into(),
            dst: dst.into(),
            present: false,
            steps: Vec::new(),
        }
    }

    pub fn from_path(g: &MultiwayGraph, path: &Path, direction: u32) -> Self {
        let steps = path
            .edges
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                let w = edge
                    .witnesses
                    .iter()
                    .find(|w| g.system().rule(w.rule).stratum() == direction)
                    .unwrap_or(&edge.witnesses[0]);
                Step {
                    edge: e,
                    src: g.node(edge.src).string.clone(),
                    dst: g.node(edge.dst).string.clone(),
                    rule: g.system().rule(w.rule).id.clone(),
                    position: w.position,
                }
            })
            .collect();
        WitnessArrow {
            direction,
            src: g.node(path.src).string.clone(),
            dst: g.node(path.dst).string.clone(),
            present: true,
            steps,
        }
    }

    pub fn from_edge(g: &MultiwayGraph, edge: EdgeId, direction: u32) -> Self {
        let e = g.edge(edge);
        let path = Path {
            src: e.src,
            dst: e.dst,
            edges: vec![edge],
        };
        Self::from_path(g, &path, direction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Edge,
    Square,
    Cube,
    Hypercube,
}

impl WitnessKind {
    pub fn for_dim(dim: usize) -> Self {
        match dim {
            0 | 1 => WitnessKind::Edge,
            2 => WitnessKind::Square,
            3 => WitnessKind::Cube,
            _ => WitnessKind::Hypercube,
        }
    }
}

/// A concrete configuration on which a law fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub dirs: Vec<u32>,
    pub corners: Vec<String>,
    pub arrows: Vec<WitnessArrow>,
}

impl Witness {
    pub fn from_cell(g: &MultiwayGraph, cell: &Cell) -> Self {
        let k = cell.dim();
        let mut arrows = Vec::new();
        for axis in 0..k {
            for c in (0..1usize << k).filter(|c| c & (1 << axis) == 0) {
                arrows.push(WitnessArrow::from_path(g, cell.side(axis, c), cell.dirs[axis]));
            }
        }
        Witness {
            kind: WitnessKind::for_dim(k),
            dirs: cell.dirs.clone(),
            corners: cell.corners.iter().map(|&n| g.node(n).string.clone()).collect(),
            arrows,
        }
    }

    pub fn edge(present: WitnessArrow, missing: Option<WitnessArrow>) -> Self {
        let dirs = vec![present.direction];
        let corners = vec![present.src.clone(), present.dst.clone()];
        let mut arrows = vec![present];
        arrows.extend(missing);
        Witness {
            kind: WitnessKind::Edge,
            dirs,
            corners,
            arrows,
        }
    }

    pub fn missing_arrows(&self) -> impl Iterator<Item = &WitnessArrow> {
        self.arrows.iter().filter(|a| !a.present)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {}",
            format!("{:?}", self.kind).to_lowercase(),
            self.corners.join(",")
        );
        for a in self.missing_arrows() {
            let _ = write!(s, "; missing {} -> {} (dir {})", a.src, a.dst, a.direction);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub name: String,
    pub passed: bool,
    /// Instances examined.
    pub checked: usize,
    pub failures: usize,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DirCount {
    pub direction: u32,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCount {
    pub dirs: Vec<u32>,
    pub count: usize,
    /// Whether cells constant along an axis were counted.
    pub with_degenerate: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SquareCensus {
    pub full: usize,
    pub triangle: usize,
    pub identity: usize,
    pub degenerate: usize,
}

impl SquareCensus {
    pub fn add(&mut self, sq: &Square) {
        match sq.kind() {
            SquareKind::Full => self.full += 1,
            SquareKind::Triangle => self.triangle += 1,
            SquareKind::Identity => self.identity += 1,
            SquareKind::Degenerate => self.degenerate += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.full + self.triangle + self.identity + self.degenerate
    }
}

/// Squares along one declared homotopy, read in one orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    pub order: u32,
    /// Index among the declared specs of this order.
    pub spec: usize,
    /// True when read from the spec's source proof to its target proof.
    pub forward: bool,
    pub source: String,
    pub target: String,
    pub squares: usize,
    pub full: usize,
    /// Squares with an identity side, at the shared endpoints.
    pub degenerate: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub order: u32,
    pub objects: usize,
    pub morphisms: Vec<DirCount>,
    pub cells: Vec<CellCount>,
    pub square_census: SquareCensus,
    pub ladders: Vec<LadderReport>,
    pub laws: Vec<LawResult>,
    /// Set by the groupoid check.
    pub groupoid: Option<bool>,
    pub passed: bool,
}

impl StructureReport {
    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawResult> {
        self.laws.iter().filter(|l| !l.passed)
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.failures().find_map(|l| l.witness.as_ref())
    }

    pub fn cell_count(&self, dirs: &[u32]) -> Option<usize> {
        self.cells.iter().find(|c| c.dirs == dirs).map(|c| c.count)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary; no line exceeds 120 columns.
    pub fn render_text(&self) -> String {
        let mut lines = Vec::new();
        let kind = match self.groupoid {
            Some(_) => "groupoid",
            None if self.order <= 2 => "double category",
            None => "n-fold category",
        };
        lines.push(format!("{kind} check, order {}", self.order));
        lines.push(format!("  objects: {}", self.objects));
        for m in &self.morphisms {
            lines.push(format!("  direction {} edges: {}", m.direction, m.edges));
        }
        for c in &self.cells {
            let dirs: Vec<String> = c.dirs.iter().map(u32::to_string).collect();
            let note = if c.with_degenerate { " (incl. degenerate)" } else { "" };
            lines.push(format!("  cells over directions {}: {}{note}", dirs.join(","), c.count));
        }
        if self.square_census.total() > 0 {
            let sc = &self.square_census;
            lines.push(format!(
                "  squares: {} full, {} triangle, {} identity, {} degenerate",
                sc.full, sc.triangle, sc.identity, sc.degenerate
            ));
        }
        let ladder_line = |l: &LadderReport| {
            let way = if l.forward { "forward" } else { "backward" };
            let status = if l.complete { "complete" } else { "INCOMPLETE" };
            format!(
                "  ladder order {} #{} {way}: {} squares ({} full, {} degenerate) {status}",
                l.order, l.spec, l.squares, l.full, l.degenerate
            )
        };
        if self.ladders.len() <= LADDER_LINES {
            lines.extend(self.ladders.iter().map(ladder_line));
        } else {
            let mut orders: Vec<u32> = self.ladders.iter().map(|l| l.order).collect();
            orders.dedup();
            for order in orders {
                let of: Vec<&LadderReport> = self.ladders.iter().filter(|l| l.order == order).collect();
                let complete = of.iter().filter(|l| l.complete).count();
                lines.push(format!(
                    "  ladders order {order}: {} built, {complete} complete",
                    of.len()
                ));
            }
            let broken: Vec<&LadderReport> = self.ladders.iter().filter(|l| !l.complete).collect();
            lines.extend(broken.iter().take(LADDER_LINES).map(|l| ladder_line(l)));
            if broken.len() > LADDER_LINES {
                lines.push(format!("  ... {} more incomplete ladders", broken.len() - LADDER_LINES));
            }
        }
        for law in &self.laws {
            let mark = if law.passed { "PASS" } else { "FAIL" };
            let mut line = format!("  [{mark}] {} ({} checked", law.name, law.checked);
            if law.failures > 0 {
                let _ = write!(line, ", {} failed", law.failures);
            }
            line.push(')');
            if !law.detail.is_empty() {
                let _ = write!(line, ": {}", law.detail);
            }
            lines.push(line);
            if let Some(w) = &law.witness {
                lines.push(format!("         witness: {}", w.summary()));
            }
        }
        lines.push(format!("  result: {}", if self.passed { "PASS" } else { "FAIL" }));
        let mut out = String::new();
        for line in lines {
            out.push_str(&clip(&line, 120));
            out.push('\n');
        }
        out
    }
}

const LADDER_LINES: usize = 12;

fn clip(line: &str, width: usize) -> String {
    if line.chars().count() <= width {
        return line.to_owned();
    }
    let mut s: String = line.chars().take(width - 3).collect();
    s.push_str("...");
    s
}
