//! The iterative sufficiency loop.
//!
//! Each round solves a level model with the current caps. Vertices that end
//! up on their top level below their eccentricity get their cap raised by
//! one and the model is solved again; a round without such vertices is
//! optimal for group farness.

use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Status;
use crate::graph::{eccentricities_serial, group_farness, Graph, VertexSet};
use crate::heuristics::{approx_pipeline, check_k, greedy, HeuristicSolution};
use crate::reductions::{reduce, ReductionResult};

use super::backend::{BackendChoice, BackendResult};
use super::{build_full_model, build_reduced_model, check_sufficiency, estimate_d, uniform_d, IlpModel};

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(600);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reduced models, caps estimated from a heuristic solution.
    #[default]
    Grover,
    /// Full models with domination only, all caps starting at 2.
    IlpInd,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grover" => Ok(Mode::Grover),
            "ilpind" => Ok(Mode::IlpInd),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub mode: Mode,
    pub backend: BackendChoice,
    /// Wall-clock budget for the whole call.
    pub time_limit: Duration,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Grover,
            backend: BackendChoice::Builtin,
            time_limit: DEFAULT_TIME_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRecord {
    pub variables: usize,
    pub objective: Option<u64>,
    pub insufficient: usize,
    pub ms: f64,
}

/// Level caps across rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationState {
    pub caps: Vec<u32>,
    pub ecc: Vec<u32>,
    pub iteration: usize,
    pub history: Vec<IterationRecord>,
}

impl IterationState {
    pub fn new(caps: Vec<u32>, ecc: Vec<u32>) -> Self {
        IterationState {
            caps,
            ecc,
            iteration: 0,
            history: Vec::new(),
        }
    }

    /// Raises each flagged cap by one, never past the eccentricity.
    pub fn raise(&mut self, flagged: &[usize]) {
        for &v in flagged {
            self.caps[v] = (self.caps[v] + 1).min(self.ecc[v]);
        }
    }

    /// `sum_v (ecc(v) - cap(v))`, which every productive round lowers.
    pub fn slack(&self) -> u64 {
        self.caps
            .iter()
            .zip(&self.ecc)
            .map(|(&c, &e)| e.saturating_sub(c) as u64)
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub reduction_ms: f64,
    pub heuristic_ms: f64,
    pub ilp_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub mode: Mode,
    /// `Optimal` or `Timeout`.
    pub status: Status,
    /// Absent on timeout.
    pub set: Option<VertexSet>,
    pub farness: Option<u64>,
    /// Number of model solves; 0 when `k = 1`.
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    /// Absent when `k = 1`.
    pub reduction: Option<ReductionResult>,
    pub heuristic: Option<HeuristicSolution>,
    pub final_model: Option<IlpModel>,
    pub final_result: Option<BackendResult>,
    pub caps: Vec<u32>,
    pub timings: Timings,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Exact group farness minimization by iterated level models.
pub fn solve_iteratively(g: &Graph, k: usize, config: &SolveConfig) -> Result<SolveOutcome> {
    check_k(k, g.n())?;
    let start = Instant::now();
    let deadline = start + config.time_limit;
    let mut timings = Timings::default();

    if k == 1 {
        // Greedy is exact for a single center.
        let t = Instant::now();
        let s = greedy(g, 1)?;
        timings.heuristic_ms = ms(t.elapsed());
        timings.total_ms = ms(start.elapsed());
        return Ok(SolveOutcome {
            mode: config.mode,
            status: Status::Optimal,
            set: Some(s.set.clone()),
            farness: Some(s.farness),
            iterations: 0,
            history: Vec::new(),
            reduction: None,
            heuristic: Some(s),
            final_model: None,
            final_result: None,
            caps: Vec::new(),
            timings,
        });
    }

    let t = Instant::now();
    let (ecc, _) = eccentricities_serial(g);
    let reduction = match config.mode {
        Mode::Grover => reduce(g, k),
        Mode::IlpInd => ReductionResult::dominated_only(g, k),
    };
    timings.reduction_ms = ms(t.elapsed());

    let t = Instant::now();
    let (heuristic, caps) = match config.mode {
        Mode::Grover => {
            let h = approx_pipeline(g, k, &reduction)?;
            let caps = estimate_d(g, &h.set, &ecc)?;
            (Some(h), caps)
        }
        Mode::IlpInd => (None, uniform_d(&ecc)),
    };
    timings.heuristic_ms = ms(t.elapsed());

    let mut state = IterationState::new(caps, ecc);
    let mut backend = config.backend.instantiate();
    let ilp_start = Instant::now();
    let outcome = |state: IterationState,
                   status,
                   set: Option<VertexSet>,
                   farness,
                   model,
                   result,
                   mut timings: Timings| {
        timings.ilp_ms = ms(ilp_start.elapsed());
        timings.total_ms = ms(start.elapsed());
        SolveOutcome {
            mode: config.mode,
            status,
            set,
            farness,
            iterations: state.iteration,
            history: state.history,
            reduction: Some(reduction.clone()),
            heuristic: heuristic.clone(),
            final_model: model,
            final_result: result,
            caps: state.caps,
            timings,
        }
    };

    loop {
        if Instant::now() >= deadline {
            return Ok(outcome(state, Status::Timeout, None, None, None, None, timings));
        }
        let t = Instant::now();
        let model = match config.mode {
            Mode::Grover => build_reduced_model(g, k, &state.caps, &reduction)?,
            Mode::IlpInd => build_full_model(g, k, &state.caps, &reduction.dominated)?,
        };
        let result = backend.solve(&model, Some(deadline))?;
        state.iteration += 1;
        match result.status {
            Status::Optimal => {}
            Status::Timeout => {
                state.history.push(IterationRecord {
                    variables: model.num_variables(),
                    objective: None,
                    insufficient: 0,
                    ms: ms(t.elapsed()),
                });
                return Ok(outcome(state, Status::Timeout, None, None, Some(model), None, timings));
            }
            Status::Infeasible => {
                return Err(Error::Internal("backend reported an infeasible model".into()));
            }
        }
        let flagged = check_sufficiency(&result, &state.caps, &state.ecc);
        state.history.push(IterationRecord {
            variables: model.num_variables(),
            objective: Some(result.objective),
            insufficient: flagged.len(),
            ms: ms(t.elapsed()),
        });
        if flagged.is_empty() {
            let set = result.assignment.selected();
            let farness = group_farness(g, &set)?;
            if farness != result.objective {
                return Err(Error::Internal(format!(
                    "model objective {} differs from farness {farness}",
                    result.objective
                )));
            }
            return Ok(outcome(
                state,
                Status::Optimal,
                Some(set),
                Some(farness),
                Some(model),
                Some(result),
                timings,
            ));
        }
        state.raise(&flagged);
    }
}
