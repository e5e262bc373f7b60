//! Machine-readable summary of one solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Status;
use crate::graph::{group_closeness, group_farness, Graph, VertexSet};
use crate::ilp::{IterationRecord, SolveOutcome, Timings};

/// Version tag of the JSON layout, matching `schema/solve_report.v1.json`.
pub const REPORT_SCHEMA: &str = "solve_report.v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Optimal,
    Timeout,
    Approx,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub dominated: usize,
    pub absorbed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub schema: &'static str,
    pub graph_name: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub mode: String,
    pub status: ReportStatus,
    /// Original vertex labels, ascending by internal id.
    pub solution_set: Vec<u64>,
    pub farness: Option<u64>,
    /// `"p/q"`, absent when undefined or unknown.
    pub closeness: Option<String>,
    pub iterations: usize,
    pub per_iteration_variable_counts: Vec<usize>,
    pub reduction_stats: ReductionStats,
    pub timings: Timings,
}

impl SolveReport {
    /// Starts a report for `set`. Farness is recomputed here; a claimed
    /// value that disagrees is an internal error.
    pub fn new(
        graph_name: &str,
        g: &Graph,
        k: usize,
        mode: &str,
        status: ReportStatus,
        set: Option<&VertexSet>,
        claimed: Option<u64>,
    ) -> Result<Self> {
        let (solution_set, farness, closeness) = match set {
            Some(s) => {
                let f = group_farness(g, s)?;
                if claimed.is_some_and(|c| c != f) {
                    return Err(Error::Internal(format!(
                        "reported farness {} differs from recomputed {f}",
                        claimed.unwrap_or_default()
                    )));
                }
                let c = group_closeness(g, s).ok().map(|r| format!("{}/{}", r.numer(), r.denom()));
                (s.iter().map(|v| g.label(v)).collect(), Some(f), c)
            }
            None => (Vec::new(), None, None),
        };
        Ok(SolveReport {
            schema: REPORT_SCHEMA,
            graph_name: graph_name.to_string(),
            n: g.n(),
            m: g.m(),
            k,
            mode: mode.to_string(),
            status,
            solution_set,
            farness,
            closeness,
            iterations: 0,
            per_iteration_variable_counts: Vec::new(),
            reduction_stats: ReductionStats::default(),
            timings: Timings::default(),
        })
    }

    pub fn from_outcome(graph_name: &str, g: &Graph, k: usize, out: &SolveOutcome) -> Result<Self> {
        let mode = match out.mode {
            crate::ilp::Mode::Grover => "grover",
            crate::ilp::Mode::IlpInd => "ilpind",
        };
        let status = match out.status {
            Status::Optimal => ReportStatus::Optimal,
            _ => ReportStatus::Timeout,
        };
        let mut r = SolveReport::new(graph_name, g, k, mode, status, out.set.as_ref(), out.farness)?;
        r.iterations = out.iterations;
        r.per_iteration_variable_counts = variable_counts(&out.history);
        if let Some(red) = &out.reduction {
            r.reduction_stats = ReductionStats {
                dominated: red.dominated.len(),
                absorbed: red.absorbed.len(),
            };
        }
        r.timings = out.timings.clone();
        Ok(r)
    }
}

fn variable_counts(history: &[IterationRecord]) -> Vec<usize> {
    history.iter().map(|h| h.variables).collect()
}
