//! Group closeness centrality maximization on unweighted, undirected,
//! connected graphs: minimize the sum of distances to the nearest member of
//! a `k`-set.
//!
//! Exact paths: brute force, set-enumeration branch-and-bound and iterated
//! distance-level 0-1 models with dominated and absorbed vertex reductions.
//! Heuristics: lazy greedy and swap local search.

pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod heuristics;
pub mod ilp;
pub mod io;
pub mod objective;
pub mod reductions;
pub mod report;

pub use error::{Error, Result};
pub use exact::{branch_and_bound, brute_force, BbResult, Status};
pub use graph::{bfs, dist_to_set, eccentricities, group_closeness, group_farness, Graph, VertexSet};
pub use heuristics::{approx_pipeline, greedy, local_search_swap, HeuristicSolution};
pub use ilp::{solve_iteratively, Mode, SolveConfig, SolveOutcome};
pub use reductions::{reduce, ReductionResult};
pub use report::SolveReport;
