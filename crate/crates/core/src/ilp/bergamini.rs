//! Assignment formulation with `y_v` (v is a center) and `x_{u,v}` (u is
//! served by v), kept as a cross-check for the level models:
//!
//! * `sum_v y_v = k`
//! * `sum_v x_{u,v} = 1` for every `u`
//! * `x_{u,v} <= y_v`
//!
//! minimizing `sum dist(u, v) x_{u,v}`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::Status;
use crate::graph::{bfs, Graph, VertexSet};
use crate::heuristics::check_k;

use super::backend::CostTable;

/// Largest graph the quadratic-size model is built for.
pub const BERGAMINI_MAX_N: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergaminiModel {
    pub k: usize,
    /// `dist[u][v]`, the cost of `x_{u,v}`.
    pub dist: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergaminiSolution {
    pub selected: VertexSet,
    /// `assigned_to[u]` is the `v` with `x_{u,v} = 1`.
    pub assigned_to: Vec<usize>,
    pub objective: u64,
    pub status: Status,
}

pub fn build_bergamini_model(g: &Graph, k: usize) -> Result<BergaminiModel> {
    check_k(k, g.n())?;
    if g.n() > BERGAMINI_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "assignment model limited to {BERGAMINI_MAX_N} vertices, graph has {}",
            g.n()
        )));
    }
    Ok(BergaminiModel {
        k,
        dist: (0..g.n()).map(|v| bfs(g, v)).collect(),
    })
}

impl BergaminiModel {
    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn num_variables(&self) -> usize {
        self.n() * (self.n() + 1)
    }

    /// Checks the three constraint families and returns the objective.
    pub fn evaluate(&self, selected: &VertexSet, assigned_to: &[usize]) -> Result<u64> {
        selected.check_within(self.n())?;
        if selected.len() != self.k {
            return Err(Error::Infeasible("k_sum".into()));
        }
        if assigned_to.len() != self.n() {
            return Err(Error::Infeasible(format!("assign_{}", assigned_to.len().min(self.n()))));
        }
        let mut objective = 0;
        for (u, &v) in assigned_to.iter().enumerate() {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
            if !selected.contains(v) {
                return Err(Error::Infeasible(format!("open_{u}_{v}")));
            }
            objective += self.dist[u][v] as u64;
        }
        Ok(objective)
    }

    /// Exact solve with the builtin set-enumeration backend. Clients go to
    /// their nearest selected vertex, ties to the lowest id.
    pub fn solve(&self, time_limit: Option<Duration>) -> Result<BergaminiSolution> {
        let n = self.n();
        let by_facility = (0..n)
            .map(|v| (0..n).map(|u| (u as u32, self.dist[u][v] as u64)).collect())
            .collect();
        let mut table = CostTable::new(vec![n as u64; n], by_facility);
        let (chosen, _, status) = table.minimize(self.k, time_limit.map(|t| Instant::now() + t));
        let selected = VertexSet::new(chosen);
        let assigned_to: Vec<usize> = (0..n)
            .map(|u| {
                selected
                    .iter()
                    .min_by_key(|&v| (self.dist[u][v], v))
                    .expect("k >= 1")
            })
            .collect();
        let objective = self.evaluate(&selected, &assigned_to)?;
        Ok(BergaminiSolution {
            selected,
            assigned_to,
            objective,
            status,
        })
    }
}
