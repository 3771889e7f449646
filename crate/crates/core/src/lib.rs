//! Multiway string rewriting with synthesized homotopies.
//!
//! The crate is organized bottom-up:
//!
//! * [`rules`]: ground string rules and the one-step rewrite relation,
//! * [`graph`]: deduplicated multiway evolution graphs, reachability and
//!   proof-path enumeration,
//! * [`homotopy`]: rung rules between parallel proofs and their iteration to
//!   higher orders,
//! * [`verify`]: executable checks of the thin double / n-fold category and
//!   groupoid structure of an extended system,
//! * [`export`]: JSON and DOT renderings.

pub mod error;
pub mod export;
pub mod graph;
pub mod homotopy;
pub mod rules;
pub mod verify;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use graph::{
    enumerate_paths, evolve, evolve_with, parallel_path_pairs, reachable, EdgeId, EvolveOptions, MultiwayGraph, NodeId,
    ProofPath,
};
pub use homotopy::{
    auto_homotopy, extend_system, iterate_homotopy, synthesize_rungs, ExtendedSystem, HomotopySpec, Limits, PairPolicy,
};
pub use rules::{apply_match, find_matches, invert_system, parse_rules, successors, MatchSite, Rule, RuleSystem};
pub use verify::{find_squares, verify_double_category, verify_groupoid, verify_nfold, StructureReport};
