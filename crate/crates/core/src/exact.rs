//! Exact combinatorial solvers: exhaustive enumeration and set-enumeration
//! branch-and-bound.
//!
//! The search tree node `T` holds a working set `S_T` and an ordered
//! candidate list `C_T`; child `i` adds `c_i` and keeps `c_{i+1..}`. Each
//! node is bounded by `f(S_T) - (sum of the k' largest gains in C_T)`,
//! which is a valid lower bound for every completion because the objective
//! is supermodular.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{bfs, Graph, VertexSet};
use crate::heuristics::{check_k, local_search_swap};
use crate::objective::{greedy_select, Farness, SetObjective};

/// Largest number of `k`-subsets [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Timeout,
    Infeasible,
}

/// `C(n, k)`, saturating once it exceeds `cap`.
fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

fn check_candidates(g: &Graph, k: usize, candidates: &VertexSet) -> Result<()> {
    candidates.check_within(g.n())?;
    check_k(k, candidates.len())
}

/// Minimum farness over all `k`-subsets of `candidates`; the
/// lexicographically smallest optimal set is returned.
pub fn brute_force(g: &Graph, k: usize, candidates: &VertexSet) -> Result<(VertexSet, u64)> {
    check_candidates(g, k, candidates)?;
    let combinations = binomial_capped(candidates.len(), k, BRUTE_FORCE_LIMIT);
    if combinations > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            combinations,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let cands = candidates.as_slice();
    let rows: Vec<Vec<u32>> = cands.iter().map(|&c| bfs(g, c)).collect();
    let n = g.n();
    // levels[d] = elementwise min of the first d chosen rows
    let mut levels = vec![vec![u32::MAX; n]; k + 1];
    let mut pick = vec![0usize; k];
    let mut best = (u64::MAX, Vec::new());

    fn rec(
        depth: usize,
        from: usize,
        k: usize,
        rows: &[Vec<u32>],
        levels: &mut [Vec<u32>],
        pick: &mut [usize],
        best: &mut (u64, Vec<usize>),
    ) {
        if depth == k {
            let f: u64 = levels[k].iter().map(|&d| d as u64).sum();
            if f < best.0 {
                *best = (f, pick.to_vec());
            }
            return;
        }
        for i in from..=rows.len() - (k - depth) {
            pick[depth] = i;
            let (lo, hi) = levels.split_at_mut(depth + 1);
            for ((out, &prev), &r) in hi[0].iter_mut().zip(&lo[depth]).zip(&rows[i]) {
                *out = prev.min(r);
            }
            rec(depth + 1, i + 1, k, rows, levels, pick, best);
        }
    }
    rec(0, 0, k, &rows, &mut levels, &mut pick, &mut best);
    let set = VertexSet::new(best.1.iter().map(|&i| cands[i]));
    Ok((set, best.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BbOptions {
    /// Prune subtrees whose bound cannot beat the incumbent.
    pub bound_pruning: bool,
    /// Drop single candidates whose own bound cannot beat the incumbent.
    pub candidate_pruning: bool,
}

impl Default for BbOptions {
    fn default() -> Self {
        BbOptions {
            bound_pruning: true,
            candidate_pruning: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Best set found, in insertion order. `None` only if no complete set
    /// was reached before a timeout.
    pub chosen: Option<Vec<usize>>,
    pub value: u64,
    pub status: Status,
    pub nodes: u64,
}

/// One inner node visited by the search, for bound-validity tests.
#[derive(Clone, Debug)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct TraceNode {
    pub working: Vec<usize>,
    pub candidates: Vec<usize>,
    pub bound: u64,
}

struct Search<'a, O: SetObjective> {
    obj: &'a mut O,
    k: usize,
    opts: BbOptions,
    deadline: Option<Instant>,
    best_value: u64,
    best_set: Option<Vec<usize>>,
    nodes: u64,
    timed_out: bool,
    trace: Option<&'a mut Vec<TraceNode>>,
}

impl<O: SetObjective> Search<'_, O> {
    fn explore(&mut self, working: &mut Vec<usize>, state: &O::State, cands: &[usize]) {
        let remaining = self.k - working.len();
        if cands.len() < remaining {
            return;
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.timed_out = true;
                return;
            }
        }
        self.nodes += 1;
        let value = self.obj.value(state);
        let mut gains: Vec<(u64, usize)> = cands.iter().map(|&c| (self.obj.gain(state, c), c)).collect();
        gains.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let top: u64 = gains[..remaining].iter().map(|g| g.0).sum();
        let bound = value.saturating_sub(top);
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(TraceNode {
                working: working.clone(),
                candidates: cands.to_vec(),
                bound,
            });
        }
        if self.opts.bound_pruning && bound >= self.best_value {
            return;
        }

        if remaining == 1 {
            for &(g, c) in &gains {
                let v = value - g;
                if v < self.best_value {
                    self.best_value = v;
                    let mut set = working.clone();
                    set.push(c);
                    self.best_set = Some(set);
                }
            }
            return;
        }

        let order: Vec<usize> = if self.opts.candidate_pruning && self.best_set.is_some() {
            let top_minus_one: u64 = gains[..remaining - 1].iter().map(|g| g.0).sum();
            gains
                .iter()
                .enumerate()
                .filter(|&(j, &(g, _))| {
                    // best k'-1 gains among the other candidates
                    let others = if j < remaining { top - g } else { top_minus_one };
                    value.saturating_sub(g + others) < self.best_value
                })
                .map(|(_, &(_, c))| c)
                .collect()
        } else {
            gains.iter().map(|&(_, c)| c).collect()
        };

        for j in 0..order.len() {
            if order.len() - j < remaining {
                break;
            }
            let c = order[j];
            let mut child = state.clone();
            self.obj.insert(&mut child, c);
            working.push(c);
            self.explore(working, &child, &order[j + 1..]);
            working.pop();
            if self.timed_out {
                return;
            }
        }
    }
}

/// Runs the set-enumeration search over `candidates` for any supermodular
/// objective. `incumbent` seeds the best known solution.
pub(crate) fn set_enumeration_search<O: SetObjective>(
    obj: &mut O,
    k: usize,
    candidates: &[usize],
    incumbent: Option<(Vec<usize>, u64)>,
    deadline: Option<Instant>,
    opts: BbOptions,
    trace: Option<&mut Vec<TraceNode>>,
) -> SearchOutcome {
    let (best_set, best_value) = match incumbent {
        Some((s, v)) => (Some(s), v),
        None => (None, u64::MAX),
    };
    let mut search = Search {
        obj,
        k,
        opts,
        deadline,
        best_value,
        best_set,
        nodes: 0,
        timed_out: false,
        trace,
    };
    let root = search.obj.empty_state();
    search.explore(&mut Vec::with_capacity(k), &root, candidates);
    SearchOutcome {
        status: if search.timed_out {
            Status::Timeout
        } else {
            Status::Optimal
        },
        value: search.best_value,
        chosen: search.best_set,
        nodes: search.nodes,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbResult {
    pub set: VertexSet,
    pub farness: u64,
    pub status: Status,
    pub nodes: u64,
}

pub fn branch_and_bound(
    g: &Graph,
    k: usize,
    candidates: &VertexSet,
    time_limit: Option<Duration>,
) -> Result<BbResult> {
    branch_and_bound_with(g, k, candidates, time_limit, BbOptions::default())
}

/// Branch-and-bound over `k`-subsets of `candidates`. The incumbent starts
/// from greedy plus swap local search within `candidates`. On timeout the
/// incumbent is returned with [`Status::Timeout`].
pub fn branch_and_bound_with(
    g: &Graph,
    k: usize,
    candidates: &VertexSet,
    time_limit: Option<Duration>,
    opts: BbOptions,
) -> Result<BbResult> {
    check_candidates(g, k, candidates)?;
    let deadline = time_limit.map(|t| Instant::now() + t);
    let start = {
        let mut obj = Farness::new(g);
        greedy_select(&mut obj, k, candidates.as_slice(), true).chosen
    };
    let ls = local_search_swap(g, k, &VertexSet::new(start), candidates)?;
    let mut obj = Farness::new(g);
    let out = set_enumeration_search(
        &mut obj,
        k,
        candidates.as_slice(),
        Some((ls.set.into_vec(), ls.farness)),
        deadline,
        opts,
        None,
    );
    Ok(BbResult {
        set: VertexSet::new(out.chosen.unwrap_or_default()),
        farness: out.value,
        status: out.status,
        nodes: out.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_counterexample, gen_random_connected};
    use crate::graph::group_farness;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// Minimum over all completions of `working` by `k - |working|`
    /// elements of `cands`.
    fn best_completion(g: &Graph, k: usize, working: &[usize], cands: &[usize]) -> u64 {
        let need = k - working.len();
        let mut best = u64::MAX;
        let m = cands.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != need {
                continue;
            }
            let s = VertexSet::new(
                working
                    .iter()
                    .copied()
                    .chain((0..m).filter(|i| mask >> i & 1 == 1).map(|i| cands[i])),
            );
            best = best.min(group_farness(g, &s).unwrap());
        }
        best
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(
            brute_force(&path(5), 1, &VertexSet::full(5)).unwrap(),
            (VertexSet::new([2]), 6)
        );
        let (g, m) = gen_counterexample(2, 2);
        assert_eq!(
            brute_force(&g, 2, &VertexSet::full(g.n())).unwrap(),
            (VertexSet::new(m.ends.clone()), 9)
        );
        let star = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        assert_eq!(
            brute_force(&star, 6, &VertexSet::full(6)).unwrap(),
            (VertexSet::full(6), 0)
        );
    }

    #[test]
    fn brute_force_picks_lexicographically_smallest() {
        // C6: every singleton is optimal
        let c6 = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        assert_eq!(brute_force(&c6, 1, &VertexSet::full(6)).unwrap().0, VertexSet::new([0]));
        assert_eq!(brute_force(&c6, 2, &VertexSet::full(6)).unwrap().0, VertexSet::new([0, 3]));
    }

    #[test]
    fn brute_force_guard() {
        let g = gen_random_connected(60, 0.1, 1);
        assert!(matches!(
            brute_force(&g, 10, &VertexSet::full(60)),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(matches!(
            brute_force(&g, 3, &VertexSet::new([1, 2])),
            Err(Error::InvalidK { .. })
        ));
    }

    #[test]
    fn bb_matches_brute_force() {
        for seed in 0..50u64 {
            let n = 8 + (seed as usize * 7) % 13;
            let g = gen_random_connected(n, 0.12 + (seed % 4) as f64 * 0.05, seed);
            for k in [2, 3] {
                let all = VertexSet::full(n);
                let (_, want) = brute_force(&g, k, &all).unwrap();
                let got = branch_and_bound(&g, k, &all, None).unwrap();
                assert_eq!(got.status, Status::Optimal);
                assert_eq!(got.farness, want, "seed {seed} k {k}");
                assert_eq!(group_farness(&g, &got.set).unwrap(), want);
                assert_eq!(got.set.len(), k);
            }
        }
    }

    #[test]
    fn bb_trivial_and_counterexample() {
        let g = path(6);
        let cands = VertexSet::new([1, 4]);
        let r = branch_and_bound(&g, 2, &cands, None).unwrap();
        assert_eq!((r.set, r.farness), (cands, 4));
        let (g3, _) = gen_counterexample(3, 2);
        let all = VertexSet::full(g3.n());
        assert_eq!(
            branch_and_bound(&g3, 2, &all, None).unwrap().farness,
            brute_force(&g3, 2, &all).unwrap().1
        );
    }

    #[test]
    fn bounds_are_valid_at_every_node() {
        for seed in 0..25u64 {
            let n = 8 + seed as usize % 7;
            let g = gen_random_connected(n, 0.2, 500 + seed);
            for k in [2, 3, 4] {
                let cands: Vec<usize> = (0..n).collect();
                let mut trace = Vec::new();
                let mut obj = Farness::new(&g);
                let opts = BbOptions {
                    bound_pruning: false,
                    candidate_pruning: false,
                };
                set_enumeration_search(&mut obj, k, &cands, None, None, opts, Some(&mut trace));
                for node in trace.iter().filter(|t| !t.working.is_empty()) {
                    let best = best_completion(&g, k, &node.working, &node.candidates);
                    assert!(node.bound <= best, "bound {} > {}", node.bound, best);
                }
            }
        }
    }

    #[test]
    fn pruning_only_shrinks_the_tree() {
        for seed in 0..20u64 {
            let g = gen_random_connected(14, 0.15, 900 + seed);
            let all: Vec<usize> = (0..14).collect();
            let run = |opts| {
                let mut obj = Farness::new(&g);
                set_enumeration_search(&mut obj, 3, &all, None, None, opts, None)
            };
            let off = run(BbOptions {
                bound_pruning: false,
                candidate_pruning: false,
            });
            let on = run(BbOptions::default());
            let bound_only = run(BbOptions {
                bound_pruning: true,
                candidate_pruning: false,
            });
            assert_eq!(on.value, off.value);
            assert_eq!(bound_only.value, off.value);
            assert!(on.nodes <= off.nodes);
            assert!(bound_only.nodes <= off.nodes);
        }
    }

    #[test]
    fn timeout_is_reported() {
        let g = gen_random_connected(120, 0.03, 4);
        let r = branch_and_bound(&g, 6, &VertexSet::full(120), Some(Duration::ZERO)).unwrap();
        assert_eq!(r.status, Status::Timeout);
        assert_eq!(r.set.len(), 6);
    }

    #[test]
    fn binomial_cap() {
        assert_eq!(binomial_capped(28, 4, 1 << 40), 20475);
        assert_eq!(binomial_capped(5, 5, 100), 1);
        assert_eq!(binomial_capped(100, 50, 1000), 1001);
    }
}
