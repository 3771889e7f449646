//! Command-line front end for `multiway-core`.
//!
//! Every command returns an [`Outcome`]: the artifact (graph, proof list,
//! rules file or report), a short summary for the terminal, and an exit
//! status. Exit statuses are a stable contract:
//!
//! | status | meaning |
//! |-------:|---------|
//! | 0 | success |
//! | 1 | usage or I/O problem |
//! | 2 | rules or config file does not parse |
//! | 3 | node, path or cell budget exceeded |
//! | 4 | requested homotopy order is inadmissible |
//! | 5 | a structure check failed (report still written) |

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use multiway_core::export::{graph_to_dot, graph_to_json};
use multiway_core::graph::enumerate_paths_between;
use multiway_core::homotopy::iterate_homotopy;
use multiway_core::verify::{verify_double_category_with, verify_nfold_with};
use multiway_core::{evolve_with, verify_groupoid, Error, ExtendedSystem, MultiwayGraph, StructureReport};
use serde::Serialize;

pub use config::{threads_from_env, Check, FileConfig, Flags, Format, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_INADMISSIBLE: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "multiway",
    version,
    about = "Multiway string rewriting with synthesized homotopies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the multiway graph and write it as json, dot or a count table.
    Evolve,
    /// List every proof of `--from ->* --to` up to `--max-len` steps.
    Proofs,
    /// Add homotopy rungs up to `--order` and write the extended rules file.
    Homotopy,
    /// Check the category or groupoid structure of an extended system.
    Verify,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub status: u8,
    pub message: String,
}

impl CliError {
    pub fn new(status: u8, message: impl Into<String>) -> Self {
        CliError {
            status,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => EXIT_PARSE,
            Error::NodeBudgetExceeded { .. } | Error::PathBudgetExceeded { .. } | Error::CellBudgetExceeded { .. } => {
                EXIT_BUDGET
            }
            _ => EXIT_USAGE,
        };
        CliError::new(status, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    /// Written to `--out`, or stdout.
    pub artifact: String,
    /// Written to stderr.
    pub summary: String,
    /// Artifact destination; stdout when absent.
    pub out: Option<PathBuf>,
}

/// Resolves the configuration and runs one command.
pub fn run(cli: &Cli, threads: usize) -> Result<Outcome, CliError> {
    let file = match &cli.flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.flags, file, threads)?;
    match cli.command {
        Command::Evolve => cmd_evolve(&cfg),
        Command::Proofs => cmd_proofs(&cfg),
        Command::Homotopy => cmd_homotopy(&cfg),
        Command::Verify => cmd_verify(&cfg),
    }
    .map(|outcome| Outcome {
        out: cfg.out.clone(),
        ..outcome
    })
}

pub fn load_system(cfg: &RunConfig) -> Result<ExtendedSystem, CliError> {
    let path = cfg
        .rules
        .as_deref()
        .ok_or_else(|| CliError::new(EXIT_USAGE, "no rules file: pass -r"))?;
    let text = read(path)?;
    ExtendedSystem::from_rules_text(&text).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn build_graph(cfg: &RunConfig, es: &ExtendedSystem) -> Result<MultiwayGraph, CliError> {
    let initial = cfg.initial_states()?;
    Ok(evolve_with(
        &initial,
        es.combined(),
        cfg.generations,
        &cfg.limits().evolve_options(),
    )?)
}

fn endpoints(cfg: &RunConfig) -> Result<(&str, &str), CliError> {
    match (&cfg.from, &cfg.to) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(CliError::new(EXIT_USAGE, "both --from and --to are required")),
    }
}

fn count_table(g: &MultiwayGraph) -> String {
    let mut out = String::new();
    let edges = g.edges_per_generation();
    for (gen, nodes) in g.layer_sizes().iter().enumerate() {
        let e = edges.get(gen).copied().unwrap_or(0);
        writeln!(out, "generation {gen}: {nodes} nodes, {e} outgoing edges").unwrap();
    }
    writeln!(out, "total: {} nodes, {} edges", g.node_count(), g.edge_count()).unwrap();
    out
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.format_or(Format::Json, &[Format::Json, Format::Dot, Format::Text])?;
    let es = load_system(cfg)?;
    let g = build_graph(cfg, &es)?;
    let table = count_table(&g);
    let (artifact, summary) = match format {
        Format::Json => (graph_to_json(&g), table),
        Format::Dot => (graph_to_dot(&g), table),
        Format::Text => (table, String::new()),
    };
    Ok(Outcome {
        status: EXIT_OK,
        artifact,
        summary,
        out: None,
    })
}

#[derive(Serialize)]
struct ProofRecord<'a> {
    length: usize,
    states: Vec<&'a str>,
    /// `rule@pos` labels of each step; parallel witnesses are comma-joined.
    steps: Vec<String>,
}

#[derive(Serialize)]
struct ProofListing<'a> {
    from: &'a str,
    to: &'a str,
    max_len: usize,
    count: usize,
    proofs: Vec<ProofRecord<'a>>,
}

pub fn cmd_proofs(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let (a, b) = endpoints(cfg)?;
    let es = load_system(cfg)?;
    let g = build_graph(cfg, &es)?;
    let paths = match (g.id_of(a), g.id_of(b)) {
        (Some(u), Some(v)) => enumerate_paths_between(&g, u, v, cfg.max_len, cfg.path_budget, |_| true)?,
        (None, _) => return Err(Error::UnknownState(a.to_owned()).into()),
        // a target outside the explored graph is simply unreachable
        (Some(_), None) => Vec::new(),
    };
    let count = format!("{} proofs\n", paths.len());
    let artifact = match format {
        Format::Json => {
            let listing = ProofListing {
                from: a,
                to: b,
                max_len: cfg.max_len,
                count: paths.len(),
                proofs: paths
                    .iter()
                    .map(|p| ProofRecord {
                        length: p.len(),
                        states: p.states(&g),
                        steps: p.edges.iter().map(|&e| step_label(&g, e)).collect(),
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&listing).expect("listing serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s: String = paths.iter().map(|p| p.render(&g) + "\n").collect();
            s.push_str(&count);
            s
        }
    };
    Ok(Outcome {
        status: EXIT_OK,
        artifact,
        summary: if format == Format::Json { count } else { String::new() },
        out: None,
    })
}

fn step_label(g: &MultiwayGraph, e: usize) -> String {
    g.edge(e)
        .witnesses
        .iter()
        .map(|w| format!("{}@{}", g.system().rule(w.rule).id, w.position))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn cmd_homotopy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.format_or(Format::Text, &[Format::Text])?;
    let (a, b) = endpoints(cfg)?;
    let es = load_system(cfg)?;
    let target = cfg.order.unwrap_or(2);
    let it = iterate_homotopy(&es, a, b, target, &cfg.limits(), cfg.policy)?;

    let mut header = String::new();
    let mut summary = String::new();
    writeln!(header, "# homotopy of {a} ->* {b}, target order {target}").unwrap();
    for s in &it.stats {
        let line = format!(
            "order {}: {} endpoint pairs, {} parallel pairs, {} specs, {} rungs",
            s.order, s.endpoint_pairs, s.parallel_pairs, s.specs, s.rungs
        );
        writeln!(header, "# {line}").unwrap();
        writeln!(summary, "{line}").unwrap();
    }
    let status = match it.inadmissible_at {
        Some(k) => {
            let reached = it.system.max_order();
            let line =
                format!("no parallel proofs at order {k}: order {target} is inadmissible, reached order {reached}");
            writeln!(header, "# {line}").unwrap();
            writeln!(summary, "{line}").unwrap();
            EXIT_INADMISSIBLE
        }
        None => EXIT_OK,
    };
    Ok(Outcome {
        status,
        artifact: header + &it.system.to_rules_text(),
        summary,
        out: None,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let mut es = load_system(cfg)?;
    if cfg.invert {
        es = es.with_inverted_base()?;
    }
    let g = build_graph(cfg, &es)?;
    let mut checks = cfg.checks.clone();
    if checks.is_empty() {
        checks.push(Check::Category);
    }
    checks.sort();
    checks.dedup();

    let mut reports: Vec<StructureReport> = Vec::new();
    for check in checks {
        let report = match check {
            Check::Category => match cfg.order.unwrap_or(es.max_order().max(2)) {
                2 => verify_double_category_with(&es, &g, cfg.cell_budget)?,
                n => verify_nfold_with(&es, &g, n, cfg.cell_budget)?,
            },
            Check::Groupoid => verify_groupoid(&es, &g, cfg.order.unwrap_or(es.max_order().max(1)))?,
        };
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed);
    let artifact = match format {
        Format::Json if reports.len() == 1 => reports[0].to_json(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
            s.push('\n');
            s
        }
        _ => reports
            .iter()
            .map(StructureReport::render_text)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    let summary = if passed {
        "all checks passed\n".to_owned()
    } else {
        let failed: Vec<&str> = reports
            .iter()
            .flat_map(|r| r.failures())
            .map(|l| l.name.as_str())
            .collect();
        format!("failed: {}\n", failed.join(", "))
    };
    Ok(Outcome {
        status: if passed { EXIT_OK } else { EXIT_VERIFY },
        artifact,
        summary,
        out: None,
    })
}
