//! Brute-force baselines over a uniform parameter grid.
//!
//! Both scans deliberately avoid the branch-and-bound machinery:
//! [`grid_inverse`] runs the greedy at every grid point, and
//! [`dense_scan_ordered`] checks the score comparisons and the knapsack
//! constraint of a fixed ordering directly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::forward::greedy_solve_preferring;
use crate::model::{
    Allocation, ObjectiveWeights, ParamBounds, ProblemInstance, RiskParams, Suggestion, TIE_REL_TOL,
};

/// Points per axis; points sit at the centers of a uniform partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_delta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_alpha: 50,
            n_beta: 50,
            n_delta: 50,
        }
    }
}

impl GridSpec {
    pub fn new(n_alpha: usize, n_beta: usize, n_delta: usize) -> Result<Self> {
        if n_alpha < 2 || n_beta < 2 || n_delta < 2 {
            return Err(ModelError::InvalidGrid);
        }
        Ok(Self {
            n_alpha,
            n_beta,
            n_delta,
        })
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn points(&self) -> usize {
        self.n_alpha * self.n_beta * self.n_delta
    }

    /// Weighted half-cell size: how far a grid optimum can sit from the
    /// best point of its cell.
    pub fn slack(&self, bounds: &ParamBounds, weights: &ObjectiveWeights) -> f64 {
        0.5 * (weights.w_alpha * bounds.alpha().width() / self.n_alpha as f64
            + weights.w_beta * bounds.beta().width() / self.n_beta as f64
            + weights.w_delta * bounds.delta().width() / self.n_delta as f64)
    }

    fn point(&self, bounds: &ParamBounds, index: usize) -> RiskParams {
        let id = index % self.n_delta;
        let ib = (index / self.n_delta) % self.n_beta;
        let ia = index / (self.n_delta * self.n_beta);
        RiskParams::new(
            bounds.alpha().cell_center(ia, self.n_alpha),
            bounds.beta().cell_center(ib, self.n_beta),
            bounds.delta().cell_center(id, self.n_delta),
        )
        .expect("grid points lie inside valid bounds")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub params: RiskParams,
    pub objective: f64,
    pub slack: f64,
    pub evaluated: usize,
    pub grid: GridSpec,
}

fn best_of(scored: impl ParallelIterator<Item = (f64, usize)>) -> Option<(f64, usize)> {
    scored.reduce_with(|a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a })
}

/// Exhaustive baseline: keeps the grid point closest to `nominal` whose
/// greedy output equals the suggestion as a set.
pub fn grid_inverse(
    instance: &ProblemInstance,
    suggestion: &Suggestion,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
    grid: &GridSpec,
) -> Result<Option<OracleResult>> {
    Suggestion::new(instance, suggestion.pairs().to_vec())?;
    let best = best_of((0..grid.points()).into_par_iter().filter_map(|k| {
        let theta = grid.point(bounds, k);
        let (produced, _) = greedy_solve_preferring(instance, &theta, suggestion.pairs());
        produced
            .same_set(suggestion.pairs())
            .then(|| (weights.distance(nominal, &theta), k))
    }));
    Ok(best.map(|(objective, k)| OracleResult {
        params: grid.point(bounds, k),
        objective,
        slack: grid.slack(bounds, weights),
        evaluated: grid.points(),
        grid: *grid,
    }))
}

/// Direct check of a fixed ordering's constraints at `params`: every
/// suggested pair out-scores the pairs still open at its step, and the
/// total cost fits the budget.
pub fn ordering_constraints_hold(
    instance: &ProblemInstance,
    ordered: &Allocation,
    params: &RiskParams,
) -> bool {
    let score = |i: usize, j: usize| {
        instance.reward(i, j) / (params.beta() * instance.neg_log_prob(i, j).powf(params.alpha()))
    };
    scores_dominate(instance, ordered, score)
        && ordered
            .pairs()
            .iter()
            .map(|&(i, j)| params.beta() * instance.neg_log_prob(i, j).powf(params.alpha()))
            .sum::<f64>()
            <= -params.delta().ln()
}

fn scores_dominate(
    instance: &ProblemInstance,
    ordered: &Allocation,
    score: impl Fn(usize, usize) -> f64,
) -> bool {
    let mut robot_taken = vec![false; instance.n_robots()];
    let mut target_taken = vec![false; instance.n_targets()];
    for &(iw, jw) in ordered.pairs() {
        let winner = score(iw, jw);
        let beaten = instance
            .pairs()
            .filter(|&(i, j)| !robot_taken[i] && !target_taken[j])
            .any(|(i, j)| score(i, j) > winner * (1.0 + TIE_REL_TOL));
        if beaten {
            return false;
        }
        robot_taken[iw] = true;
        target_taken[jw] = true;
    }
    true
}

/// Grid scan of the fixed-order subproblem.
pub fn dense_scan_ordered(
    instance: &ProblemInstance,
    ordered: &Allocation,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
    grid: &GridSpec,
) -> Option<OracleResult> {
    let alphas: Vec<f64> = (0..grid.n_alpha)
        .map(|k| bounds.alpha().cell_center(k, grid.n_alpha))
        .collect();
    // Scores share the factor 1/beta, so dominance depends on alpha alone
    // and the cost sum scales linearly in beta; tabulate both per alpha.
    let per_alpha: Vec<Option<f64>> = alphas
        .iter()
        .map(|&a| {
            let dominates = scores_dominate(instance, ordered, |i, j| {
                instance.reward(i, j) / instance.neg_log_prob(i, j).powf(a)
            });
            dominates.then(|| {
                ordered
                    .pairs()
                    .iter()
                    .map(|&(i, j)| instance.neg_log_prob(i, j).powf(a))
                    .sum::<f64>()
            })
        })
        .collect();
    let per_slab = grid.n_beta * grid.n_delta;
    let best = best_of((0..grid.points()).into_par_iter().filter_map(|k| {
        let cost_sum = per_alpha[k / per_slab]?;
        let theta = grid.point(bounds, k);
        (theta.beta() * cost_sum <= -theta.delta().ln())
            .then(|| (weights.distance(nominal, &theta), k))
    }));
    best.map(|(objective, k)| OracleResult {
        params: grid.point(bounds, k),
        objective,
        slack: grid.slack(bounds, weights),
        evaluated: grid.points(),
        grid: *grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::greedy_solve;
    use crate::model::Interval;

    fn sample() -> ProblemInstance {
        ProblemInstance::new(
            vec![
                vec![10.0, 4.0, 7.0],
                vec![3.0, 9.0, 5.0],
                vec![6.0, 2.0, 8.0],
            ],
            vec![
                vec![0.95, 0.7, 0.8],
                vec![0.6, 0.97, 0.75],
                vec![0.9, 0.85, 0.96],
            ],
        )
        .unwrap()
    }

    // 4-point axes over these bounds have centers 0.5, 1.0, 1.5, 2.0 and 0.75, 0.8, 0.85, 0.9
    fn on_grid_bounds() -> ParamBounds {
        ParamBounds::new(
            Interval::new(0.25, 2.25),
            Interval::new(0.25, 2.25),
            Interval::new(0.725, 0.925),
        )
        .unwrap()
    }

    #[test]
    fn identity_on_grid_is_zero() {
        let inst = sample();
        let bounds = on_grid_bounds();
        let grid = GridSpec::cubic(4).unwrap();
        let nominal = RiskParams::new(1.0, 1.0, 0.8).unwrap();
        let w = ObjectiveWeights::default();
        assert!(w.distance(&grid.point(&bounds, 16 + 4 + 1), &nominal) < 1e-12);
        let (alloc, _) = greedy_solve(&inst, &nominal);
        let sugg = Suggestion::from_allocation(&alloc).unwrap();
        let res = grid_inverse(
            &inst,
            &sugg,
            &nominal,
            &ObjectiveWeights::default(),
            &bounds,
            &grid,
        )
        .unwrap()
        .unwrap();
        assert!(res.objective < 1e-12);
        let res = dense_scan_ordered(
            &inst,
            &alloc,
            &nominal,
            &ObjectiveWeights::default(),
            &bounds,
            &grid,
        )
        .unwrap();
        assert!(res.objective < 1e-12);
    }

    #[test]
    fn unrealizable_ordering_scans_empty() {
        // a pair that is dominated for every alpha can never be picked first
        let inst = ProblemInstance::new(vec![vec![1.0, 5.0]], vec![vec![0.5, 0.5]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let nominal = RiskParams::new(1.0, 1.0, 0.8).unwrap();
        let grid = GridSpec::cubic(10).unwrap();
        assert!(dense_scan_ordered(
            &inst,
            &ordered,
            &nominal,
            &ObjectiveWeights::default(),
            &ParamBounds::default(),
            &grid
        )
        .is_none());
    }

    #[test]
    fn invalid_grid_and_suggestion() {
        assert!(GridSpec::new(1, 5, 5).is_err());
        let inst = sample();
        assert!(Suggestion::new(&inst, vec![(0, 0), (0, 1)]).is_err());
    }

    #[test]
    fn scans_return_points_that_reverify() {
        let inst = sample();
        let nominal = RiskParams::new(1.0, 1.0, 0.8).unwrap();
        let theta = RiskParams::new(0.6, 0.5, 0.7).unwrap();
        let (alloc, _) = greedy_solve(&inst, &theta);
        let sugg = Suggestion::from_allocation(&alloc).unwrap();
        let grid = GridSpec::cubic(12).unwrap();
        let w = ObjectiveWeights::default();
        let b = ParamBounds::default();
        if let Some(res) = grid_inverse(&inst, &sugg, &nominal, &w, &b, &grid).unwrap() {
            assert!(crate::forward::verify_forward(&inst, &res.params, &sugg).matches);
        }
        if let Some(res) = dense_scan_ordered(&inst, &alloc, &nominal, &w, &b, &grid) {
            assert!(ordering_constraints_hold(&inst, &alloc, &res.params));
        }
    }
}
