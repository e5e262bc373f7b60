//! Greedy construction and swap-based local search.
//!
//! Local search stops at a set where no single swap improves farness; such a
//! set is within a factor 5 of the optimum, also when swaps are restricted
//! to a search space that still contains an optimal solution (e.g. `V \ D`).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{group_farness, Graph, VertexSet};
use crate::objective::{greedy_select, Farness, SetObjective};
use crate::reductions::ReductionResult;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicSolution {
    pub set: VertexSet,
    pub farness: u64,
    /// Marginal-gain or swap evaluations performed.
    pub evaluations: u64,
    /// Improving swaps applied.
    pub swaps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GreedyMode {
    /// Re-evaluate candidates only while their stale gain can still win.
    #[default]
    Lazy,
    /// Evaluate every candidate in every round.
    Plain,
}

pub(crate) fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::InvalidK { k, max });
    }
    Ok(())
}

pub fn greedy(g: &Graph, k: usize) -> Result<HeuristicSolution> {
    greedy_with(g, k, GreedyMode::Lazy)
}

/// Greedy: start from the empty set and repeatedly add the vertex with the
/// largest farness reduction, ties to the lowest id.
pub fn greedy_with(g: &Graph, k: usize, mode: GreedyMode) -> Result<HeuristicSolution> {
    check_k(k, g.n())?;
    let candidates: Vec<usize> = (0..g.n()).collect();
    let mut obj = Farness::new(g);
    let run = greedy_select(&mut obj, k, &candidates, mode == GreedyMode::Lazy);
    Ok(HeuristicSolution {
        farness: obj.value(&run.state),
        set: VertexSet::new(run.chosen),
        evaluations: run.evaluations,
        swaps: 0,
    })
}

/// First-improvement swap local search. Scans `s` in the current set and
/// `o` in `search_space \ S`, both ascending, applies the first swap that
/// strictly lowers farness and restarts the scan; stops at a local optimum.
pub fn local_search_swap(
    g: &Graph,
    k: usize,
    initial: &VertexSet,
    search_space: &VertexSet,
) -> Result<HeuristicSolution> {
    check_k(k, g.n())?;
    if initial.len() != k {
        return Err(Error::SetSize {
            expected: k,
            actual: initial.len(),
        });
    }
    search_space.check_within(g.n())?;
    if let Some(v) = initial.iter().find(|&v| !search_space.contains(v)) {
        return Err(Error::OutsideSearchSpace(v));
    }

    let mut current = initial.clone();
    let mut farness = group_farness(g, &current)?;
    let mut evaluations = 0u64;
    let mut swaps = 0u64;
    'scan: loop {
        let members = current.clone();
        for s in members.iter() {
            for o in search_space.iter().filter(|&o| !members.contains(o)) {
                let candidate = VertexSet::new(current.iter().filter(|&x| x != s).chain([o]));
                let f = group_farness(g, &candidate)?;
                evaluations += 1;
                if f < farness {
                    current = candidate;
                    farness = f;
                    swaps += 1;
                    continue 'scan;
                }
            }
        }
        break;
    }
    Ok(HeuristicSolution {
        set: current,
        farness,
        evaluations,
        swaps,
    })
}

/// Moves every member of `set` into `allowed`: dominated vertices are
/// replaced by a surviving dominator, falling back to the lowest unused
/// allowed vertex. The result has the same size as `set`.
pub fn project_to_centers(set: &VertexSet, reduction: &ReductionResult) -> VertexSet {
    let allowed = reduction.centers();
    let mut out: Vec<usize> = set.iter().filter(|&v| allowed.contains(v)).collect();
    for v in set.iter().filter(|&v| !allowed.contains(v)) {
        let u = reduction.surviving_dominator(v);
        let pick = if !out.contains(&u) {
            Some(u)
        } else {
            allowed.iter().find(|w| !out.contains(w))
        };
        out.extend(pick);
    }
    VertexSet::new(out)
}

/// Greedy followed by swap local search restricted to `V \ D`.
pub fn approx_pipeline(
    g: &Graph,
    k: usize,
    reduction: &ReductionResult,
) -> Result<HeuristicSolution> {
    let start = greedy(g, k)?;
    let initial = project_to_centers(&start.set, reduction);
    let mut ls = local_search_swap(g, k, &initial, &reduction.centers())?;
    ls.evaluations += start.evaluations;
    Ok(ls)
}

/// Swap local search from a seeded uniformly random `k`-subset of the
/// search space.
pub fn local_search_random_start(
    g: &Graph,
    k: usize,
    search_space: &VertexSet,
    seed: u64,
) -> Result<HeuristicSolution> {
    check_k(k, search_space.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = search_space.as_slice().to_vec();
    pool.shuffle(&mut rng);
    pool.truncate(k);
    local_search_swap(g, k, &VertexSet::new(pool), search_space)
}
