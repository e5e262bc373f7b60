//! Distance-level 0-1 models and the iterative sufficiency loop.
//!
//! A level model has a binary `x_{v,i}` for every modeled vertex `v` and
//! level `i` in `lo(v)..=cap(v)`, where `lo(v) = 0` for center-eligible
//! vertices and `1` otherwise. The constraints are
//!
//! * `k_sum`: `sum_{v in centers} x_{v,0} = k`
//! * `assign_v`: `sum_i x_{v,i} = 1`
//! * `link_v_i` for `1 <= i < cap(v)`: `x_{v,i} <= sum_{w in centers, dist(v,w) = i} x_{w,0}`
//!
//! The top level `x_{v,cap(v)}` is not linked: it stands for
//! `dist(v, S) >= cap(v)`, which is what makes a truncated model a
//! relaxation and the sufficiency test meaningful. Level `i` of `v` costs
//! `alpha(v) * (i + 1) + i`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{dist_to_set, Graph, VertexSet};
use crate::reductions::ReductionResult;

pub mod backend;
pub mod bergamini;
pub mod lp;
pub mod solve;
pub mod transform;

pub use backend::{builtin_backend_solve, Backend, BackendChoice, BackendResult, BuiltinBackend, ExternalBackend};
pub use bergamini::{build_bergamini_model, BergaminiModel, BergaminiSolution};
pub use lp::{export_lp, import_solution, parse_lp};
pub use solve::{solve_iteratively, IterationRecord, IterationState, Mode, SolveConfig, SolveOutcome, Timings};
pub use transform::{reconstruct_full_assignment, Reconstruction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// All vertices modeled, objective `i` per level.
    Full,
    /// Absorbed vertices folded into their absorbers.
    Reduced,
}

/// Variables and constraints belonging to one modeled vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRow {
    pub vertex: usize,
    pub alpha: u32,
    pub cap: u32,
    /// Whether `x_{v,0}` exists.
    pub center: bool,
    /// `supporters[i]` lists the centers at distance exactly `i` from the
    /// vertex, for `1 <= i < cap`; index 0 is unused.
    pub supporters: Vec<Vec<usize>>,
}

impl VertexRow {
    pub fn min_level(&self) -> u32 {
        if self.center {
            0
        } else {
            1
        }
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.min_level()..=self.cap
    }

    pub fn coefficient(&self, level: u32) -> u64 {
        self.alpha as u64 * (level as u64 + 1) + level as u64
    }

    /// Level this vertex takes in an optimal completion for the center set
    /// `selected`: its distance to the set, truncated at `cap`.
    pub fn level_for(&self, selected: &VertexSet) -> u32 {
        if self.center && selected.contains(self.vertex) {
            return 0;
        }
        (1..self.cap)
            .find(|&i| self.supporters[i as usize].iter().any(|&w| selected.contains(w)))
            .unwrap_or(self.cap)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpModel {
    pub kind: ModelKind,
    pub k: usize,
    /// Vertices with a level-0 variable.
    pub centers: VertexSet,
    /// One entry per modeled vertex, ascending by vertex id.
    pub rows: Vec<VertexRow>,
}

/// Active (value 1) variables of a 0-1 assignment, as `(vertex, level)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub ones: BTreeSet<(usize, u32)>,
}

impl Assignment {
    pub fn is_one(&self, v: usize, level: u32) -> bool {
        self.ones.contains(&(v, level))
    }

    /// Vertices whose level-0 variable is active.
    pub fn selected(&self) -> VertexSet {
        self.ones.iter().filter(|&&(_, i)| i == 0).map(|&(v, _)| v).collect()
    }
}

pub fn var_name(v: usize, level: u32) -> String {
    format!("x_{v}_{level}")
}

impl IlpModel {
    pub fn num_variables(&self) -> usize {
        self.rows.iter().map(|r| (r.cap - r.min_level() + 1) as usize).sum()
    }

    pub fn row(&self, v: usize) -> Option<&VertexRow> {
        self.rows
            .binary_search_by_key(&v, |r| r.vertex)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn has_variable(&self, v: usize, level: u32) -> bool {
        self.row(v).is_some_and(|r| r.levels().contains(&level))
    }

    /// Level caps by vertex, `None` for unmodeled vertices.
    pub fn caps(&self, n: usize) -> Vec<Option<u32>> {
        let mut out = vec![None; n];
        for r in &self.rows {
            out[r.vertex] = Some(r.cap);
        }
        out
    }

    /// The optimal assignment for a fixed center set, with its objective.
    pub fn assignment_for(&self, selected: &VertexSet) -> (Assignment, u64) {
        let mut ones = BTreeSet::new();
        let mut objective = 0;
        for r in &self.rows {
            let level = r.level_for(selected);
            objective += r.coefficient(level);
            ones.insert((r.vertex, level));
        }
        (Assignment { ones }, objective)
    }

    /// Checks every constraint and returns the objective. Errors name the
    /// first violated row.
    pub fn evaluate(&self, a: &Assignment) -> Result<u64> {
        for &(v, i) in &a.ones {
            if !self.has_variable(v, i) {
                return Err(Error::UnknownVariable(var_name(v, i)));
            }
        }
        let chosen = a.ones.iter().filter(|&&(_, i)| i == 0).count();
        if chosen != self.k {
            return Err(Error::Infeasible("k_sum".into()));
        }
        let selected = a.selected();
        let mut objective = 0;
        for r in &self.rows {
            let active: Vec<u32> = r.levels().filter(|&i| a.is_one(r.vertex, i)).collect();
            if active.len() != 1 {
                return Err(Error::Infeasible(format!("assign_{}", r.vertex)));
            }
            let i = active[0];
            if i >= 1 && i < r.cap && !r.supporters[i as usize].iter().any(|&w| selected.contains(w)) {
                return Err(Error::Infeasible(format!("link_{}_{}", r.vertex, i)));
            }
            objective += r.coefficient(i);
        }
        Ok(objective)
    }
}

/// Centers at each distance `1..cap` from `v`, via a BFS truncated at
/// depth `cap - 1`. Also reports whether the BFS ball already covers the
/// whole graph, which means `cap > ecc(v)`.
fn supporters_of(g: &Graph, v: usize, cap: u32, is_center: &[bool], seen: &mut [u32], epoch: u32) -> (Vec<Vec<usize>>, bool) {
    let mut by_level = vec![Vec::new(); cap.max(1) as usize];
    let mut frontier = vec![v];
    seen[v] = epoch;
    let mut reached = 1;
    for depth in 1..cap {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if seen[w] != epoch {
                    seen[w] = epoch;
                    next.push(w);
                }
            }
        }
        reached += next.len();
        let mut centers: Vec<usize> = next.iter().copied().filter(|&w| is_center[w]).collect();
        centers.sort_unstable();
        by_level[depth as usize] = centers;
        frontier = next;
    }
    (by_level, reached == g.n() && cap > 0 && g.n() > 1)
}

/// Shared builder. `rows` yields `(vertex, alpha)`. With `check_caps`,
/// a cap above the vertex's eccentricity is rejected.
pub(crate) fn build_level_model(
    g: &Graph,
    k: usize,
    kind: ModelKind,
    caps: &[u32],
    centers: &VertexSet,
    rows: impl Iterator<Item = (usize, u32)>,
    check_caps: bool,
) -> Result<IlpModel> {
    if k == 0 {
        return Err(Error::InvalidK { k, max: centers.len() });
    }
    if centers.len() < k {
        return Err(Error::TooFewCenters {
            available: centers.len(),
            k,
        });
    }
    if caps.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "level caps cover {} vertices, graph has {}",
            caps.len(),
            g.n()
        )));
    }
    let mut is_center = vec![false; g.n()];
    for c in centers.iter() {
        is_center[c] = true;
    }
    let mut seen = vec![0u32; g.n()];
    let mut out = Vec::new();
    for (epoch, (v, alpha)) in rows.enumerate() {
        let cap = caps[v];
        if !is_center[v] && cap == 0 {
            return Err(Error::InvalidParameter(format!("vertex {v} has no variables")));
        }
        let (supporters, beyond_ecc) = supporters_of(g, v, cap, &is_center, &mut seen, epoch as u32 + 1);
        if check_caps && beyond_ecc {
            return Err(Error::InvalidParameter(format!(
                "level cap {cap} of vertex {v} exceeds its eccentricity"
            )));
        }
        out.push(VertexRow {
            vertex: v,
            alpha,
            cap,
            center: is_center[v],
            supporters,
        });
    }
    Ok(IlpModel {
        kind,
        k,
        centers: centers.clone(),
        rows: out,
    })
}

/// Full model over every vertex; vertices in `dominated` lose `x_{v,0}`.
pub fn build_full_model(g: &Graph, k: usize, caps: &[u32], dominated: &VertexSet) -> Result<IlpModel> {
    let centers = dominated.complement(g.n());
    build_level_model(g, k, ModelKind::Full, caps, &centers, (0..g.n()).map(|v| (v, 0)), true)
}

/// Reduced model over `V \ A` with absorbed costs folded into `alpha`.
pub fn build_reduced_model(g: &Graph, k: usize, caps: &[u32], reduction: &ReductionResult) -> Result<IlpModel> {
    let centers = reduction.centers();
    let rows = (0..g.n())
        .filter(|&v| !reduction.absorbed.contains(v))
        .map(|v| (v, reduction.alpha[v]));
    build_level_model(g, k, ModelKind::Reduced, caps, &centers, rows, true)
}

/// Initial caps from a heuristic set: `min(ecc(v), max(dist(v, S) + 1, 2))`.
pub fn estimate_d(g: &Graph, heuristic: &VertexSet, ecc: &[u32]) -> Result<Vec<u32>> {
    let dist = dist_to_set(g, heuristic)?;
    Ok(dist
        .iter()
        .zip(ecc)
        .map(|(&d, &e)| (d + 1).max(2).min(e))
        .collect())
}

/// Initial caps of the plain iterative scheme: 2, or the eccentricity if
/// that is smaller.
pub fn uniform_d(ecc: &[u32]) -> Vec<u32> {
    ecc.iter().map(|&e| e.min(2)).collect()
}

/// Vertices whose top level is active while the cap is below their
/// eccentricity.
pub fn check_sufficiency(result: &BackendResult, caps: &[u32], ecc: &[u32]) -> Vec<usize> {
    result
        .assignment
        .ones
        .iter()
        .filter(|&&(v, i)| i == caps[v] && caps[v] < ecc[v])
        .map(|&(v, _)| v)
        .collect()
}
