//! Lifting a reduced-model solution back to the full model.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::graph::Graph;
use crate::reductions::ReductionResult;

use super::backend::BackendResult;
use super::{build_level_model, Assignment, IlpModel, ModelKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    /// Level caps for every vertex: absorbed `v` gets `cap(rho(v)) + 1`.
    pub caps: Vec<u32>,
    pub model: IlpModel,
    pub assignment: Assignment,
}

/// Rebuilds a full-model assignment from a reduced solution. Absorbed `v`
/// has no level-0 variable and takes `x_{v,i} = x~_{rho(v), i-1}`; every
/// other vertex copies its reduced row.
pub fn reconstruct_full_assignment(
    g: &Graph,
    reduced: &IlpModel,
    result: &BackendResult,
    reduction: &ReductionResult,
) -> Result<Reconstruction> {
    let n = g.n();
    let mut caps = vec![0u32; n];
    let reduced_caps = reduced.caps(n);
    for v in 0..n {
        caps[v] = match reduction.rho[v] {
            Some(r) => reduced_caps[r].expect("absorber is modeled") + 1,
            None => reduced_caps[v].expect("non-absorbed vertex is modeled"),
        };
    }
    let mut level = vec![None; n];
    for &(v, i) in &result.assignment.ones {
        level[v] = Some(i);
    }
    let mut ones = BTreeSet::new();
    for v in 0..n {
        let l = match reduction.rho[v] {
            Some(r) => level[r].map(|i| i + 1),
            None => level[v],
        };
        if let Some(l) = l {
            ones.insert((v, l));
        }
    }
    // Caps of absorbed vertices may reach ecc + 1 when the absorber sits
    // at its own eccentricity, so they are not checked here.
    let model = build_level_model(
        g,
        reduced.k,
        ModelKind::Full,
        &caps,
        &reduced.centers,
        (0..n).map(|v| (v, 0)),
        false,
    )?;
    Ok(Reconstruction {
        caps,
        model,
        assignment: Assignment { ones },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_random_connected;
    use crate::graph::eccentricities;
    use crate::ilp::{build_reduced_model, builtin_backend_solve};
    use crate::reductions::reduce;

    #[test]
    fn star_reconstruction() {
        let g = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        let red = reduce(&g, 1);
        let m = build_reduced_model(&g, 1, &[1, 2, 2, 2, 2, 2], &red).unwrap();
        let res = builtin_backend_solve(&m, None).unwrap();
        let rec = reconstruct_full_assignment(&g, &m, &res, &red).unwrap();
        for leaf in 1..6 {
            assert!(rec.assignment.is_one(leaf, 1));
            assert_eq!(rec.caps[leaf], 2);
        }
        assert_eq!(rec.model.evaluate(&rec.assignment).unwrap(), 5);
    }

    #[test]
    fn identity_without_absorption() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let (ecc, _) = eccentricities(&g);
        let red = reduce(&g, 2);
        assert!(red.absorbed.is_empty());
        let m = build_reduced_model(&g, 2, &ecc, &red).unwrap();
        let res = builtin_backend_solve(&m, None).unwrap();
        let rec = reconstruct_full_assignment(&g, &m, &res, &red).unwrap();
        assert_eq!(rec.assignment, res.assignment);
        assert_eq!(rec.caps, ecc);
    }

    #[test]
    fn reconstruction_is_feasible_and_objective_equal() {
        for seed in 0..40 {
            let g = gen_random_connected(10 + seed as usize % 10, 0.15, 1200 + seed);
            let (ecc, _) = eccentricities(&g);
            let k = 2 + seed as usize % 2;
            let red = reduce(&g, k);
            let caps: Vec<u32> = ecc.iter().map(|&e| e.min(3)).collect();
            let m = build_reduced_model(&g, k, &caps, &red).unwrap();
            let res = builtin_backend_solve(&m, None).unwrap();
            let rec = reconstruct_full_assignment(&g, &m, &res, &red).unwrap();
            assert_eq!(rec.model.evaluate(&rec.assignment).unwrap(), res.objective);
        }
    }
}
