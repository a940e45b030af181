//! Absorbing random-walk centrality.
//!
//! Given query nodes `Q` in an undirected graph, find `k` candidate nodes
//! that minimize the expected number of steps a restarting random walk
//! started from `Q` needs to hit one of them. The crate provides exact and
//! series evaluation of that objective, a greedy optimizer that maintains
//! the fundamental matrix with rank-one updates, the spectral, PageRank,
//! degree and distance heuristics, Monte-Carlo and exhaustive oracles, and
//! an experiment harness that writes CSV results.

pub mod error;
pub mod experiment;
pub mod fundamental;
pub mod graph;
pub mod greedy;
pub mod heuristics;
pub mod oracle;
pub mod walk;

pub use error::{Error, Result};
pub use fundamental::FundamentalState;
pub use graph::{Graph, LoadedGraph, NodeSet};
pub use greedy::{best_singleton, gain, greedy, GreedyOptions, SelectionResult};
pub use walk::{approximate_ac, build_transition, exact_ac, CentralityProblem, TransitionSystem};
