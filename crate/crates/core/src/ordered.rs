//! Inverse problem for a fixed pick order.
//!
//! Fixing the order in which the greedy must pick the suggested pairs turns
//! every score comparison into a half-line in `alpha` (the scale `beta`
//! cancels from both sides). What remains nonconvex is the knapsack
//! constraint `sum_k L_k^alpha <= -ln(delta) / beta`. It is handled by
//! branch-and-bound over `(beta, delta)` boxes: over a box the right-hand
//! side is at most its value at the lower-left corner, which gives a convex
//! relaxation in `alpha` alone, and that same corner is always an exactly
//! feasible point when the relaxation is feasible.

use std::collections::VecDeque;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::convex::{ExpSum, Sublevel};
use crate::error::ModelError;
use crate::model::{
    Allocation, Interval, ObjectiveWeights, ParamBounds, ProblemInstance, RiskParams,
    BUDGET_ABS_TOL,
};

/// Boxes are pruned only when their bound exceeds the incumbent by more
/// than this.
pub const PRUNE_SLACK: f64 = 1e-12;

/// Margin, in log-score units, by which a pick must out-score every
/// competitor. It exceeds the greedy's relative tie tolerance, so recovered
/// parameters reproduce the ordering under any tie-breaking rule.
pub const DOMINANCE_MARGIN: f64 = 4e-9;

/// Linear score-dominance constraint `coeff * alpha >= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaHalfLine {
    pub coeff: f64,
    pub bound: f64,
}

impl AlphaHalfLine {
    pub fn holds(&self, alpha: f64) -> bool {
        self.coeff * alpha >= self.bound - 1e-12 * self.bound.abs().max(1.0)
    }
}

/// Closed interval of admissible `alpha`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AlphaInterval {
    pub const EMPTY: Self = Self {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self::EMPTY
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn contains(&self, alpha: f64) -> bool {
        self.lo <= alpha && alpha <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Nearest point of the interval to `alpha`.
    pub fn clamp(&self, alpha: f64) -> Option<f64> {
        (!self.is_empty()).then(|| alpha.clamp(self.lo, self.hi))
    }
}

/// One dominance half-line per (pick step, competing available pair).
pub fn build_dominance_constraints(
    instance: &ProblemInstance,
    ordered: &Allocation,
) -> Vec<AlphaHalfLine> {
    let log_cost = |i: usize, j: usize| instance.neg_log_prob(i, j).ln();
    let mut robot_taken = vec![false; instance.n_robots()];
    let mut target_taken = vec![false; instance.n_targets()];
    let mut out = Vec::new();
    for &(iw, jw) in ordered.pairs() {
        let (lw, rw) = (log_cost(iw, jw), instance.reward(iw, jw).ln());
        for (i, j) in instance.pairs() {
            if robot_taken[i] || target_taken[j] || (i, j) == (iw, jw) {
                continue;
            }
            out.push(AlphaHalfLine {
                coeff: log_cost(i, j) - lw,
                bound: instance.reward(i, j).ln() - rw,
            });
        }
        robot_taken[iw] = true;
        target_taken[jw] = true;
    }
    out
}

/// Demands a strict win of [`DOMINANCE_MARGIN`] on every half-line except
/// exact ties (equal reward and equal risk), which no alpha can break.
pub fn with_strict_margin(halflines: &[AlphaHalfLine]) -> Vec<AlphaHalfLine> {
    halflines
        .iter()
        .map(|h| {
            if h.coeff == 0.0 && h.bound == 0.0 {
                *h
            } else {
                AlphaHalfLine {
                    coeff: h.coeff,
                    bound: h.bound + DOMINANCE_MARGIN,
                }
            }
        })
        .collect()
}

/// Intersects the half-lines with the alpha bounds.
pub fn alpha_interval_from_halflines(
    halflines: &[AlphaHalfLine],
    bounds: &ParamBounds,
) -> AlphaInterval {
    let (mut lo, mut hi) = (bounds.alpha().lo, bounds.alpha().hi);
    for h in halflines {
        if h.coeff > 0.0 {
            lo = lo.max(h.bound / h.coeff);
        } else if h.coeff < 0.0 {
            hi = hi.min(h.bound / h.coeff);
        } else if h.bound > 0.0 {
            return AlphaInterval::EMPTY;
        }
    }
    AlphaInterval::new(lo, hi)
}

/// `{alpha in search : sum_k costs[k]^alpha <= rhs}`.
pub fn budget_alpha_interval(costs: &[f64], rhs: f64, search: AlphaInterval) -> AlphaInterval {
    if search.is_empty() {
        return AlphaInterval::EMPTY;
    }
    ExpSum::from_bases(costs)
        .sublevel(rhs, search.lo, search.hi)
        .map_or(AlphaInterval::EMPTY, |s| AlphaInterval::new(s.lo, s.hi))
}

/// A `[beta_lo, beta_hi] x [delta_lo, delta_hi]` cell of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamBox {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub delta_lo: f64,
    pub delta_hi: f64,
    pub depth: u32,
}

impl ParamBox {
    pub fn root(bounds: &ParamBounds) -> Self {
        let (b, d) = (bounds.beta(), bounds.delta());
        Self {
            beta_lo: b.lo,
            beta_hi: b.hi,
            delta_lo: d.lo,
            delta_hi: d.hi,
            depth: 0,
        }
    }

    pub fn beta(&self) -> Interval {
        Interval::new(self.beta_lo, self.beta_hi)
    }

    pub fn delta(&self) -> Interval {
        Interval::new(self.delta_lo, self.delta_hi)
    }

    /// Largest knapsack right-hand side `-ln(delta) / beta` over the box.
    pub fn max_rhs(&self) -> f64 {
        -self.delta_lo.ln() / self.beta_lo
    }

    /// Smallest knapsack right-hand side over the box.
    pub fn min_rhs(&self) -> f64 {
        -self.delta_hi.ln() / self.beta_hi
    }

    fn product(&self, betas: &[Interval], deltas: &[Interval]) -> Vec<Self> {
        let depth = self.depth + 1;
        betas
            .iter()
            .flat_map(|b| {
                deltas.iter().map(move |d| Self {
                    beta_lo: b.lo,
                    beta_hi: b.hi,
                    delta_lo: d.lo,
                    delta_hi: d.hi,
                    depth,
                })
            })
            .collect()
    }

    /// Splits at the nominal `(beta, delta)`; zero-width pieces are dropped.
    pub fn split_at(&self, beta: f64, delta: f64) -> Vec<Self> {
        self.product(
            &split_axis(self.beta(), beta),
            &split_axis(self.delta(), delta),
        )
    }

    /// Splits both axes at their midpoints.
    pub fn bisect(&self) -> Vec<Self> {
        let (b, d) = (self.beta(), self.delta());
        self.product(
            &split_axis(b, 0.5 * (b.lo + b.hi)),
            &split_axis(d, 0.5 * (d.lo + d.hi)),
        )
    }
}

fn split_axis(iv: Interval, at: f64) -> Vec<Interval> {
    let parts: Vec<_> = [Interval::new(iv.lo, at), Interval::new(at, iv.hi)]
        .into_iter()
        .filter(|p| p.width() > 0.0)
        .collect();
    if parts.is_empty() {
        vec![iv]
    } else {
        parts
    }
}

/// Outcome of bounding one box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub feasible: bool,
    pub value: f64,
    pub candidate: Option<RiskParams>,
}

impl BoundResult {
    const INFEASIBLE: Self = Self {
        feasible: false,
        value: f64::INFINITY,
        candidate: None,
    };
}

/// Up to two disjoint alpha intervals.
#[derive(Debug, Clone, Copy)]
struct AlphaSet {
    parts: [AlphaInterval; 2],
}

impl AlphaSet {
    const EMPTY: Self = Self {
        parts: [AlphaInterval::EMPTY; 2],
    };

    fn single(iv: AlphaInterval) -> Self {
        Self {
            parts: [iv, AlphaInterval::EMPTY],
        }
    }

    fn nearest(&self, alpha: f64) -> Option<f64> {
        self.parts
            .iter()
            .filter_map(|p| p.clamp(alpha))
            .min_by(|a, b| (a - alpha).abs().total_cmp(&(b - alpha).abs()))
    }
}

/// Extra constraint that every pair left over after the ordering breaks the
/// budget, so the greedy stops exactly at the end of the ordering.
#[derive(Debug, Clone)]
struct StopTerms {
    /// `g(alpha) + L_min^alpha` where `L_min` is the cheapest leftover cost.
    with_cheapest: ExpSum,
}

/// A fixed-order inverse subproblem with its alpha-only structure
/// precomputed, so that bounding a box costs a few bisections.
#[derive(Debug, Clone)]
pub struct OrderedProblem {
    nominal: RiskParams,
    weights: ObjectiveWeights,
    bounds: ParamBounds,
    dominance: AlphaInterval,
    budget_terms: ExpSum,
    budget_argmin: f64,
    stop: Option<StopTerms>,
}

impl OrderedProblem {
    pub fn new(
        instance: &ProblemInstance,
        ordered: &Allocation,
        nominal: &RiskParams,
        weights: &ObjectiveWeights,
        bounds: &ParamBounds,
    ) -> Result<Self, ModelError> {
        if !bounds.contains(nominal) {
            return Err(ModelError::NominalOutOfBounds);
        }
        let dominance = alpha_interval_from_halflines(
            &with_strict_margin(&build_dominance_constraints(instance, ordered)),
            bounds,
        );
        let costs: Vec<f64> = ordered
            .pairs()
            .iter()
            .map(|&(i, j)| instance.neg_log_prob(i, j))
            .collect();
        let budget_terms = ExpSum::from_bases(&costs);
        let budget_argmin = if dominance.is_empty() {
            f64::NAN
        } else {
            budget_terms.argmin(dominance.lo, dominance.hi)
        };
        Ok(Self {
            nominal: *nominal,
            weights: *weights,
            bounds: *bounds,
            dominance,
            budget_terms,
            budget_argmin,
            stop: None,
        })
    }

    /// Adds the "every leftover pair overflows the budget" requirement.
    /// `leftover_costs` are the `-ln p` values of pairs still available
    /// after the ordering; an empty slice leaves the problem unchanged.
    pub fn with_stopping(mut self, leftover_costs: &[f64]) -> Self {
        if let Some(cheapest) = leftover_costs.iter().copied().reduce(f64::min) {
            self.stop = Some(StopTerms {
                with_cheapest: self.budget_terms.with_term(cheapest.ln()),
            });
        }
        self
    }

    pub fn nominal(&self) -> &RiskParams {
        &self.nominal
    }

    pub fn weights(&self) -> &ObjectiveWeights {
        &self.weights
    }

    pub fn bounds(&self) -> &ParamBounds {
        &self.bounds
    }

    /// Alpha range allowed by the dominance half-lines alone.
    pub fn dominance_interval(&self) -> AlphaInterval {
        self.dominance
    }

    fn budget_set(&self, rhs: f64) -> Option<Sublevel> {
        if self.dominance.is_empty() {
            return None;
        }
        self.budget_terms.sublevel_around(
            rhs,
            self.dominance.lo,
            self.dominance.hi,
            self.budget_argmin,
        )
    }

    /// Alphas with budget sum `<= budget_rhs` and, in stopping mode, budget
    /// sum plus the cheapest leftover `> stop_rhs`.
    fn alpha_set(&self, budget_rhs: f64, stop_rhs: f64) -> AlphaSet {
        let Some(base) = self.budget_set(budget_rhs) else {
            return AlphaSet::EMPTY;
        };
        let base_iv = AlphaInterval::new(base.lo, base.hi);
        let Some(stop) = &self.stop else {
            return AlphaSet::single(base_iv);
        };
        match stop.with_cheapest.sublevel(stop_rhs, base.lo, base.hi) {
            None => AlphaSet::single(base_iv),
            Some(inside) => AlphaSet {
                parts: [
                    inside
                        .outer_lo
                        .map_or(AlphaInterval::EMPTY, |x| AlphaInterval::new(base.lo, x)),
                    inside
                        .outer_hi
                        .map_or(AlphaInterval::EMPTY, |x| AlphaInterval::new(x, base.hi)),
                ],
            },
        }
    }

    /// Lower and upper bound of the subproblem restricted to `cell`.
    pub fn bound_box(&self, cell: &ParamBox) -> (BoundResult, BoundResult) {
        let (max_rhs, min_rhs) = (cell.max_rhs(), cell.min_rhs());
        let relaxed = self.alpha_set(max_rhs, min_rhs);
        let Some(alpha_lb) = relaxed.nearest(self.nominal.alpha()) else {
            return (BoundResult::INFEASIBLE, BoundResult::INFEASIBLE);
        };
        let w = &self.weights;
        let lower = BoundResult {
            feasible: true,
            value: w.w_alpha * (alpha_lb - self.nominal.alpha()).abs()
                + w.w_beta * cell.beta().distance(self.nominal.beta())
                + w.w_delta * cell.delta().distance(self.nominal.delta()),
            candidate: None,
        };
        // the greedy accepts overruns up to BUDGET_ABS_TOL, so the leftover
        // pair must overflow by more than that at the corner's beta
        let corner = if self.stop.is_some() {
            self.alpha_set(
                max_rhs,
                max_rhs * (1.0 + 1e-12) + 4.0 * BUDGET_ABS_TOL / cell.beta_lo,
            )
        } else {
            relaxed
        };
        let upper = match corner.nearest(self.nominal.alpha()) {
            None => BoundResult::INFEASIBLE,
            Some(alpha) => BoundResult {
                feasible: true,
                value: w.w_alpha * (alpha - self.nominal.alpha()).abs()
                    + w.w_beta * (cell.beta_lo - self.nominal.beta()).abs()
                    + w.w_delta * (cell.delta_lo - self.nominal.delta()).abs(),
                candidate: RiskParams::new(alpha, cell.beta_lo, cell.delta_lo).ok(),
            },
        };
        (lower, upper)
    }

    /// Checks the exact (unrelaxed) constraints at `params`.
    pub fn is_feasible(&self, params: &RiskParams) -> bool {
        let a = params.alpha();
        let rhs = -params.delta().ln() / params.beta();
        let slack = 1e-9 * rhs.max(1.0);
        let dominance_ok = self.dominance.lo - 1e-12 <= a && a <= self.dominance.hi + 1e-12;
        let budget_ok = self.budget_terms.value(a) <= rhs + slack;
        let stop_ok = self
            .stop
            .as_ref()
            .is_none_or(|s| s.with_cheapest.value(a) > rhs - slack);
        dominance_ok && budget_ok && stop_ok && self.bounds.contains(params)
    }
}

/// Lower bound of the fixed-order subproblem over one box.
pub fn box_lower_bound(
    instance: &ProblemInstance,
    ordered: &Allocation,
    cell: &ParamBox,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
) -> Result<BoundResult, ModelError> {
    Ok(
        OrderedProblem::new(instance, ordered, nominal, weights, bounds)?
            .bound_box(cell)
            .0,
    )
}

/// Feasible point and its objective at the box's lower-left corner.
pub fn box_upper_bound(
    instance: &ProblemInstance,
    ordered: &Allocation,
    cell: &ParamBox,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
) -> Result<BoundResult, ModelError> {
    Ok(
        OrderedProblem::new(instance, ordered, nominal, weights, bounds)?
            .bound_box(cell)
            .1,
    )
}

/// Worst-case suboptimality of [`solve_ordered`] at search depth `depth`.
pub fn ordered_gap_bound(
    depth: u32,
    nominal: &RiskParams,
    bounds: &ParamBounds,
    weights: &ObjectiveWeights,
) -> Result<f64, ModelError> {
    if depth < 2 {
        return Err(ModelError::InvalidDepth(depth));
    }
    let scale = 2f64.powi(depth as i32 - 1);
    let (b, d) = (bounds.beta(), bounds.delta());
    let beta_span = (nominal.beta() - b.lo).max(b.hi - nominal.beta());
    let delta_span = (nominal.delta() - d.lo).max(d.hi - nominal.delta());
    Ok(weights.w_beta * beta_span / scale + weights.w_delta * delta_span / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSolution {
    pub params: RiskParams,
    pub objective: f64,
    pub gap: f64,
    pub nodes_expanded: usize,
    pub boxes_evaluated: usize,
    pub depth_reached: u32,
    pub peak_queue: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderedError {
    #[error("no parameters within the bounds realize this ordering")]
    Infeasible,
    #[error("time budget exhausted")]
    TimedOut { best: Option<Box<OrderedSolution>> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Branch-and-bound over `(beta, delta)` boxes for a fixed ordering.
pub fn solve_ordered(
    instance: &ProblemInstance,
    ordered: &Allocation,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
    max_depth: u32,
) -> Result<OrderedSolution, OrderedError> {
    let problem = OrderedProblem::new(instance, ordered, nominal, weights, bounds)?;
    solve_ordered_problem(&problem, max_depth, None)
}

/// Breadth-first box search on a prepared subproblem.
///
/// The root box is split at the nominal `(beta, delta)`; every later split
/// halves both axes. Children whose relaxation is infeasible or whose lower
/// bound exceeds the incumbent are dropped, and boxes at `max_depth` are
/// bounded but not split further.
pub fn solve_ordered_problem(
    problem: &OrderedProblem,
    max_depth: u32,
    deadline: Option<Instant>,
) -> Result<OrderedSolution, OrderedError> {
    let gap = ordered_gap_bound(
        max_depth,
        &problem.nominal,
        &problem.bounds,
        &problem.weights,
    )?;
    let mut best: Option<(f64, RiskParams)> = None;
    let mut stats = (0usize, 0usize, 0u32, 0usize); // expanded, evaluated, depth, peak queue
    let snapshot = |best: &Option<(f64, RiskParams)>, stats: (usize, usize, u32, usize)| {
        best.map(|(objective, params)| OrderedSolution {
            params,
            objective,
            gap,
            nodes_expanded: stats.0,
            boxes_evaluated: stats.1,
            depth_reached: stats.2,
            peak_queue: stats.3,
        })
    };

    if !problem.dominance.is_empty() {
        let mut queue = VecDeque::from([(ParamBox::root(&problem.bounds), 0.0)]);
        while let Some((node, node_lb)) = queue.pop_front() {
            let incumbent = best.map_or(f64::INFINITY, |b| b.0);
            if node_lb > incumbent + PRUNE_SLACK {
                continue;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(OrderedError::TimedOut {
                    best: snapshot(&best, stats).map(Box::new),
                });
            }
            stats.0 += 1;
            let children = if node.depth == 0 {
                node.split_at(problem.nominal.beta(), problem.nominal.delta())
            } else {
                node.bisect()
            };
            for child in children {
                stats.1 += 1;
                stats.2 = stats.2.max(child.depth);
                let (lower, upper) = problem.bound_box(&child);
                if !lower.feasible {
                    continue;
                }
                let incumbent = best.map_or(f64::INFINITY, |b| b.0);
                if lower.value > incumbent + PRUNE_SLACK {
                    continue;
                }
                if let (true, Some(candidate)) = (upper.feasible, upper.candidate) {
                    if upper.value < incumbent {
                        best = Some((upper.value, candidate));
                    }
                }
                if child.depth < max_depth {
                    queue.push_back((child, lower.value));
                    stats.3 = stats.3.max(queue.len());
                }
            }
        }
    }
    snapshot(&best, stats).ok_or(OrderedError::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::greedy_solve;
    use crate::model::Interval;

    fn params(a: f64, b: f64, d: f64) -> RiskParams {
        RiskParams::new(a, b, d).unwrap()
    }

    fn wide_bounds() -> ParamBounds {
        ParamBounds::new(
            Interval::new(0.1, 3.0),
            Interval::new(0.1, 2.0),
            Interval::new(0.5, 0.99),
        )
        .unwrap()
    }

    #[test]
    fn halfline_example() {
        let inst = ProblemInstance::new(vec![vec![10.0, 1.0]], vec![vec![0.9, 0.5]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let hl = build_dominance_constraints(&inst, &ordered);
        assert_eq!(hl.len(), 1);
        assert!((hl[0].coeff - 1.883_854_406_730_781).abs() < 1e-12);
        assert!((hl[0].bound + 2.302_585_092_994_045_7).abs() < 1e-12);
        assert!((hl[0].bound / hl[0].coeff + 1.222_273_379_921_076).abs() < 1e-12);
        let iv = alpha_interval_from_halflines(&hl, &wide_bounds());
        assert_eq!((iv.lo, iv.hi), (0.1, 3.0));
    }

    #[test]
    fn equal_probability_degeneracy() {
        let inst = ProblemInstance::new(vec![vec![1.0, 2.0]], vec![vec![0.7, 0.7]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let hl = build_dominance_constraints(&inst, &ordered);
        assert_eq!(hl[0].coeff, 0.0);
        assert!(alpha_interval_from_halflines(&hl, &wide_bounds()).is_empty());
        let flipped = Allocation::new(&inst, vec![(0, 1)]).unwrap();
        let hl = build_dominance_constraints(&inst, &flipped);
        assert!(!alpha_interval_from_halflines(&hl, &wide_bounds()).is_empty());
    }

    #[test]
    fn lone_pair_has_no_competitors() {
        let inst = ProblemInstance::new(vec![vec![3.0]], vec![vec![0.6]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        assert!(build_dominance_constraints(&inst, &ordered).is_empty());
    }

    #[test]
    fn interval_from_halflines_examples() {
        let b = wide_bounds();
        assert_eq!(
            alpha_interval_from_halflines(&[], &b),
            AlphaInterval::new(0.1, 3.0)
        );
        let both = [
            AlphaHalfLine {
                coeff: 1.0,
                bound: 0.5,
            },
            AlphaHalfLine {
                coeff: -1.0,
                bound: -2.0,
            },
        ];
        assert_eq!(
            alpha_interval_from_halflines(&both, &b),
            AlphaInterval::new(0.5, 2.0)
        );
        let clash = [
            AlphaHalfLine {
                coeff: 1.0,
                bound: 2.0,
            },
            AlphaHalfLine {
                coeff: -1.0,
                bound: -1.0,
            },
        ];
        assert!(alpha_interval_from_halflines(&clash, &b).is_empty());
    }

    #[test]
    fn budget_interval_examples() {
        let search = AlphaInterval::new(0.1, 3.0);
        let iv = budget_alpha_interval(&[-(0.9f64.ln())], -(0.8f64.ln()), search);
        assert!((iv.lo - 0.666_531_178_512_467_4).abs() < 2e-10);
        assert_eq!(iv.hi, 3.0);

        let e_inv = [1.0; 3];
        assert_eq!(budget_alpha_interval(&e_inv, 3.0, search), search);
        assert!(budget_alpha_interval(&e_inv, 2.999, search).is_empty());

        assert!(budget_alpha_interval(&[2.0], 1.0, search).is_empty());
    }

    #[test]
    fn box_bound_examples() {
        let inst = ProblemInstance::new(vec![vec![5.0]], vec![vec![0.9]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let nominal = params(1.0, 1.0, 0.9);
        let w = ObjectiveWeights::new(1.0, 1.0, 20.0).unwrap();
        let b = wide_bounds();

        let cell = ParamBox {
            beta_lo: 1.0,
            beta_hi: 1.0,
            delta_lo: 0.5,
            delta_hi: 0.8,
            depth: 1,
        };
        let lb = box_lower_bound(&inst, &ordered, &cell, &nominal, &w, &b).unwrap();
        assert!(lb.feasible);
        assert!((lb.value - 20.0 * 0.1).abs() < 1e-12);

        let around = ParamBox {
            beta_lo: 0.5,
            beta_hi: 1.5,
            delta_lo: 0.5,
            delta_hi: 0.95,
            depth: 1,
        };
        assert_eq!(
            box_lower_bound(&inst, &ordered, &around, &nominal, &w, &b)
                .unwrap()
                .value,
            0.0
        );

        let above = ParamBox {
            beta_lo: 1.2,
            beta_hi: 1.5,
            delta_lo: 0.92,
            delta_hi: 0.95,
            depth: 2,
        };
        let lb = box_lower_bound(&inst, &ordered, &above, &nominal, &w, &b).unwrap();
        let ub = box_upper_bound(&inst, &ordered, &above, &nominal, &w, &b).unwrap();
        // the budget forces alpha above ln(C) / ln(L) with C = -ln(0.92) / 1.2
        let alpha_min = (-(0.92f64.ln()) / 1.2).ln() / (-(0.9f64.ln())).ln();
        assert!(alpha_min > 1.0);
        assert!((lb.value - (alpha_min - 1.0 + 0.2 + 20.0 * 0.02)).abs() < 1e-9);
        assert!(ub.value >= lb.value);

        let slack_nominal = params(1.0, 1.0, 0.85);
        let corner = ParamBox {
            beta_lo: 1.0,
            beta_hi: 2.0,
            delta_lo: 0.85,
            delta_hi: 0.99,
            depth: 1,
        };
        let ub = box_upper_bound(&inst, &ordered, &corner, &slack_nominal, &w, &b).unwrap();
        assert_eq!(ub.value, 0.0);
        assert_eq!(ub.candidate, Some(slack_nominal));

        let doubled = ParamBox {
            beta_lo: 2.0,
            beta_hi: 2.0,
            delta_lo: 0.9,
            delta_hi: 0.9,
            depth: 1,
        };
        let ub = box_upper_bound(&inst, &ordered, &doubled, &nominal, &w, &b).unwrap();
        assert!(ub.value >= 1.0);
    }

    #[test]
    fn gap_examples() {
        let nominal = params(1.0, 1.0, 0.8);
        let b = ParamBounds::new(
            Interval::new(0.1, 3.0),
            Interval::new(0.1, 2.0),
            Interval::new(0.5, 0.99),
        )
        .unwrap();
        let w = ObjectiveWeights::new(1.0, 1.0, 20.0).unwrap();
        let g4 = ordered_gap_bound(4, &nominal, &b, &w).unwrap();
        assert!((g4 - 0.875).abs() < 1e-12);
        assert!((ordered_gap_bound(5, &nominal, &b, &w).unwrap() - g4 / 2.0).abs() < 1e-15);
        let only_alpha = ObjectiveWeights::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            ordered_gap_bound(7, &nominal, &b, &only_alpha).unwrap(),
            0.0
        );
        assert!(ordered_gap_bound(1, &nominal, &b, &w).is_err());
    }

    #[test]
    fn identity_inversion() {
        let inst = ProblemInstance::new(
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
        .unwrap();
        let nominal = params(1.0, 1.0, 0.8);
        let (alloc, _) = greedy_solve(&inst, &nominal);
        assert!(!alloc.is_empty());
        let sol = solve_ordered(
            &inst,
            &alloc,
            &nominal,
            &ObjectiveWeights::default(),
            &wide_bounds(),
            3,
        )
        .unwrap();
        assert_eq!(sol.objective, 0.0);
        assert_eq!(sol.params, nominal);
    }

    #[test]
    fn forced_alpha_out_of_bounds_is_infeasible() {
        // winner needs alpha >= 2 to beat the competitor
        let lw = 0.25f64;
        let lc = 0.5f64;
        let p = |l: f64| (-l).exp();
        let r_c = 1.0;
        let r_w = r_c * (lw / lc).powf(2.0);
        let inst = ProblemInstance::new(vec![vec![r_w, r_c]], vec![vec![p(lw), p(lc)]]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let bounds = ParamBounds::new(
            Interval::new(0.1, 1.0),
            Interval::new(0.1, 2.0),
            Interval::new(0.5, 0.99),
        )
        .unwrap();
        let res = solve_ordered(
            &inst,
            &ordered,
            &params(0.5, 1.0, 0.8),
            &ObjectiveWeights::default(),
            &bounds,
            4,
        );
        assert_eq!(res, Err(OrderedError::Infeasible));
    }

    #[test]
    fn zero_width_root_children_dropped() {
        let root = ParamBox::root(&wide_bounds());
        assert_eq!(root.split_at(0.1, 0.8).len(), 2);
        assert_eq!(root.split_at(1.0, 0.8).len(), 4);
        let kids = root.split_at(1.0, 0.8);
        assert!(kids.iter().all(|k| k.depth == 1));
        assert_eq!(kids[0].bisect().len(), 4);
    }
}
