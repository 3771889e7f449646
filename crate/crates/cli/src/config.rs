use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use multiway_core::graph::{DEFAULT_NODE_BUDGET, DEFAULT_PATH_BUDGET};
use multiway_core::homotopy::{Limits, PairPolicy};
use multiway_core::verify::DEFAULT_CELL_BUDGET;
use serde::Deserialize;

use crate::{CliError, EXIT_PARSE, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Text => "text",
        }
    }
}

/// Structure checks run by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Double category for order 2, n-fold category above.
    Category,
    Groupoid,
}

/// Command-line flags. Every field is optional so that a config file can
/// fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Rules file.
    #[arg(short = 'r', long, global = true)]
    pub rules: Option<PathBuf>,
    /// Initial state; repeat for several.
    #[arg(short = 'i', long = "initial", global = true)]
    pub initial: Vec<String>,
    #[arg(short = 'g', long, global = true)]
    pub generations: Option<usize>,
    /// Source state of the proposition.
    #[arg(long, global = true)]
    pub from: Option<String>,
    /// Target state of the proposition.
    #[arg(long, global = true)]
    pub to: Option<String>,
    /// Longest proof considered.
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    /// Target homotopy order (homotopy) or checked order (verify).
    #[arg(long, global = true)]
    pub order: Option<u32>,
    #[arg(long, global = true)]
    pub node_budget: Option<usize>,
    #[arg(long, global = true)]
    pub path_budget: Option<usize>,
    #[arg(long, global = true)]
    pub cell_budget: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(short = 'o', long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for any of these flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Which parallel proofs get rungs: `extremal` or `all`.
    #[arg(long, global = true)]
    pub policy: Option<PairPolicy>,
    /// Checks for `verify`; repeat for several.
    #[arg(long = "check", global = true, value_enum)]
    pub checks: Vec<Check>,
    /// Add the inverse of every base rule before verifying.
    #[arg(long, global = true)]
    pub invert: bool,
}

/// Contents of a `--config` file. Keys mirror the long flag names with
/// underscores.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rules: Option<PathBuf>,
    pub initial: Option<Vec<String>>,
    pub generations: Option<usize>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub max_len: Option<usize>,
    pub order: Option<u32>,
    pub node_budget: Option<usize>,
    pub path_budget: Option<usize>,
    pub cell_budget: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub policy: Option<String>,
    pub checks: Option<Vec<Check>>,
    pub invert: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::new(EXIT_PARSE, format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // paths inside the file are relative to the file
        let dir = path.parent().unwrap_or(Path::new(""));
        cfg.rules = cfg.rules.map(|p| dir.join(p));
        cfg.out = cfg.out.map(|p| dir.join(p));
        Ok(cfg)
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub rules: Option<PathBuf>,
    pub initial: Vec<String>,
    pub generations: usize,
    pub from: Option<String>,
    pub to: Option<String>,
    pub max_len: usize,
    pub order: Option<u32>,
    pub node_budget: usize,
    pub path_budget: usize,
    pub cell_budget: usize,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub policy: PairPolicy,
    pub checks: Vec<Check>,
    pub invert: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rules: None,
            initial: Vec::new(),
            generations: 8,
            from: None,
            to: None,
            max_len: 8,
            order: None,
            node_budget: DEFAULT_NODE_BUDGET,
            path_budget: DEFAULT_PATH_BUDGET,
            cell_budget: DEFAULT_CELL_BUDGET,
            format: None,
            out: None,
            policy: PairPolicy::default(),
            checks: Vec::new(),
            invert: false,
            threads: 1,
        }
    }
}

impl RunConfig {
    /// Flags win over the file, the file over the defaults.
    pub fn resolve(flags: &Flags, file: FileConfig, threads: usize) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let policy = match (flags.policy, file.policy) {
            (Some(p), _) => p,
            (None, Some(s)) => s
                .parse()
                .map_err(|e: String| CliError::new(EXIT_PARSE, format!("config: {e}")))?,
            (None, None) => d.policy,
        };
        let cfg = RunConfig {
            rules: flags.rules.clone().or(file.rules),
            initial: if flags.initial.is_empty() {
                file.initial.unwrap_or_default()
            } else {
                flags.initial.clone()
            },
            generations: flags.generations.or(file.generations).unwrap_or(d.generations),
            from: flags.from.clone().or(file.from),
            to: flags.to.clone().or(file.to),
            max_len: flags.max_len.or(file.max_len).unwrap_or(d.max_len),
            order: flags.order.or(file.order),
            node_budget: flags.node_budget.or(file.node_budget).unwrap_or(d.node_budget),
            path_budget: flags.path_budget.or(file.path_budget).unwrap_or(d.path_budget),
            cell_budget: flags.cell_budget.or(file.cell_budget).unwrap_or(d.cell_budget),
            format: flags.format.or(file.format),
            out: flags.out.clone().or(file.out),
            policy,
            checks: if flags.checks.is_empty() {
                file.checks.unwrap_or_default()
            } else {
                flags.checks.clone()
            },
            invert: flags.invert || file.invert.unwrap_or(false),
            threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("node budget", self.node_budget),
            ("path budget", self.path_budget),
            ("cell budget", self.cell_budget),
            ("thread count", self.threads),
        ] {
            if v == 0 {
                return Err(CliError::new(EXIT_USAGE, format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn limits(&self) -> Limits {
        Limits {
            generations: self.generations,
            max_len: self.max_len,
            node_budget: self.node_budget,
            path_budget: self.path_budget,
            cell_budget: self.cell_budget,
            threads: self.threads,
        }
    }

    /// `-i` states, or the proposition source when none are given.
    pub fn initial_states(&self) -> Result<Vec<String>, CliError> {
        if !self.initial.is_empty() {
            return Ok(self.initial.clone());
        }
        match &self.from {
            Some(a) => Ok(vec![a.clone()]),
            None => Err(CliError::new(EXIT_USAGE, "no initial state: pass -i or --from")),
        }
    }

    pub fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::new(
                EXIT_USAGE,
                format!("format `{}` is not available here", f.name()),
            ))
        }
    }
}

/// Thread count from the value of `MULTIWAY_THREADS`; unset means one per
/// available core.
pub fn threads_from_env(value: Option<&str>) -> Result<usize, CliError> {
    match value {
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::new(
                EXIT_USAGE,
                format!("MULTIWAY_THREADS must be a positive integer, got `{s}`"),
            )),
        },
    }
}
