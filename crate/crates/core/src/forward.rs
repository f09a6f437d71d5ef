//! Greedy forward allocator.
//!
//! At every step the allocator picks the still-available pair with the
//! largest cost-scaled reward `r / (beta (-ln p)^alpha)` and keeps it only
//! if the cumulative cost stays within `-ln delta`. The first pair that
//! would exceed the budget ends the run; cheaper candidates are not tried.

use serde::Serialize;

use crate::model::{
    budget, Allocation, Pair, ProblemInstance, RiskParams, Suggestion, BUDGET_ABS_TOL, TIE_REL_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    pub pair: Pair,
    pub score: f64,
    pub cost: f64,
    pub cumulative_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    BudgetExhausted,
    AllAllocated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub steps: Vec<GreedyStep>,
    pub terminated_by: Termination,
    pub budget: f64,
}

impl GreedyTrace {
    pub fn budget_used(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative_cost)
    }
}

/// Runs the greedy with lexicographic (robot, then target) tie-breaking.
pub fn greedy_solve(instance: &ProblemInstance, params: &RiskParams) -> (Allocation, GreedyTrace) {
    greedy_solve_preferring(instance, params, &[])
}

/// Runs the greedy, resolving score ties in favour of `preferred` pairs.
///
/// Among pairs whose score is within [`TIE_REL_TOL`] of the step maximum,
/// the one listed earliest in `preferred` wins; if none is listed the
/// lexicographically smallest pair wins.
pub fn greedy_solve_preferring(
    instance: &ProblemInstance,
    params: &RiskParams,
    preferred: &[Pair],
) -> (Allocation, GreedyTrace) {
    let (n_r, n_t) = (instance.n_robots(), instance.n_targets());
    let (alpha, beta) = (params.alpha(), params.beta());
    let costs: Vec<f64> = instance
        .pairs()
        .map(|(i, j)| beta * instance.neg_log_prob(i, j).powf(alpha))
        .collect();
    let scores: Vec<f64> = instance
        .pairs()
        .zip(&costs)
        .map(|((i, j), c)| instance.reward(i, j) / c)
        .collect();
    let rank = |pair: Pair| preferred.iter().position(|&p| p == pair);

    let capacity = budget(params);
    let mut robot_used = vec![false; n_r];
    let mut target_used = vec![false; n_t];
    let mut chosen = Vec::new();
    let mut steps = Vec::new();
    let mut used = 0.0;
    let mut terminated_by = Termination::AllAllocated;

    while chosen.len() < instance.max_pairs() {
        let available = || {
            (0..n_r)
                .filter(|&i| !robot_used[i])
                .flat_map(|i| (0..n_t).filter(|&j| !target_used[j]).map(move |j| (i, j)))
        };
        let best = available()
            .map(|(i, j)| scores[i * n_t + j])
            .fold(f64::NEG_INFINITY, f64::max);
        let cutoff = best - TIE_REL_TOL * best.abs();
        let mut pick: Option<(Pair, Option<usize>)> = None;
        for pair in available().filter(|&(i, j)| scores[i * n_t + j] >= cutoff) {
            let r = rank(pair);
            pick = match pick {
                None => Some((pair, r)),
                Some((_, None)) if r.is_some() => Some((pair, r)),
                Some((_, Some(cur))) if r.is_some_and(|r| r < cur) => Some((pair, r)),
                keep => keep,
            };
        }
        let Some(((i, j), _)) = pick else { break };
        let cost = costs[i * n_t + j];
        if used + cost > capacity + BUDGET_ABS_TOL {
            terminated_by = Termination::BudgetExhausted;
            break;
        }
        used += cost;
        robot_used[i] = true;
        target_used[j] = true;
        chosen.push((i, j));
        steps.push(GreedyStep {
            pair: (i, j),
            score: scores[i * n_t + j],
            cost,
            cumulative_cost: used,
        });
    }

    let trace = GreedyTrace {
        steps,
        terminated_by,
        budget: capacity,
    };
    (Allocation::from_trusted(chosen), trace)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardCheck {
    pub matches: bool,
    pub produced: Allocation,
}

/// Re-runs the greedy under `params` and compares its output with the
/// suggestion as a set. Score ties favour suggestion pairs.
pub fn verify_forward(
    instance: &ProblemInstance,
    params: &RiskParams,
    suggestion: &Suggestion,
) -> ForwardCheck {
    let (produced, _) = greedy_solve_preferring(instance, params, suggestion.pairs());
    ForwardCheck {
        matches: produced.same_set(suggestion.pairs()),
        produced,
    }
}
