//! Inverse problem for an unordered suggestion.
//!
//! The search walks over pick orders of the suggestion depth-first. A node
//! holds an ordered prefix; solving the fixed-order subproblem on the
//! prefix lower-bounds every completion of it (longer orders only add
//! constraints), up to the subproblem's own gap `epsilon`. Prefixes whose
//! subproblem is infeasible, or whose objective reaches the best complete
//! ordering plus `epsilon`, are cut.

use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::error::ModelError;
use crate::forward::verify_forward;
use crate::model::{
    Allocation, ObjectiveWeights, Pair, ParamBounds, ProblemInstance, RiskParams, Suggestion,
};
use crate::ordered::{ordered_gap_bound, solve_ordered_problem, OrderedError, OrderedProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct InverseConfig {
    /// Box search depth of every fixed-order subproblem (at least 2).
    pub max_depth: u32,
    /// Pruning tolerance; defaults to the subproblem gap bound.
    pub epsilon: Option<f64>,
    /// Also require the greedy to stop right after the suggestion.
    pub strict_stop: bool,
    pub deadline: Option<Instant>,
    /// Keep every (parent, child) objective pair for inspection.
    pub record_edges: bool,
}

impl Default for InverseConfig {
    fn default() -> Self {
        Self {
            max_depth: 8,
            epsilon: None,
            strict_stop: false,
            deadline: None,
            record_edges: false,
        }
    }
}

impl InverseConfig {
    pub fn with_depth(max_depth: u32) -> Self {
        Self {
            max_depth,
            ..Self::default()
        }
    }
}

fn as_millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub subproblems_solved: usize,
    pub pruned_infeasible: usize,
    pub pruned_bound: usize,
    #[serde(rename = "wall_ms", serialize_with = "as_millis")]
    pub wall_time: Duration,
    pub peak_tree_size: usize,
}

/// Objectives on one edge of the ordering tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeEdge {
    pub prefix_len: usize,
    pub parent_objective: f64,
    pub child_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseSolution {
    pub params: RiskParams,
    pub objective: f64,
    pub epsilon: f64,
    /// Pick order certifying the recovered parameters.
    pub ordering: Allocation,
    /// Whether the greedy under `params` reproduces the suggestion.
    pub verified: bool,
    pub stats: SearchStats,
    #[serde(skip)]
    pub edges: Vec<TreeEdge>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    #[error("no ordering of the suggestion is realizable within the bounds")]
    Infeasible { stats: SearchStats },
    #[error("time budget exhausted")]
    TimedOut {
        partial: Option<Box<InverseSolution>>,
        stats: SearchStats,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Knapsack inequality that one leftover pair must violate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingConstraint {
    pub pair: Pair,
    /// `-ln p` of the leftover pair.
    pub cost_base: f64,
}

/// Pairs still open after `ordered`; each must overflow the budget for the
/// greedy to stop there. Empty when the ordering fills every robot or target.
pub fn strict_stopping_constraints(
    instance: &ProblemInstance,
    ordered: &Allocation,
    suggestion: &Suggestion,
) -> Vec<StoppingConstraint> {
    debug_assert!(ordered.same_set(suggestion.pairs()));
    let robot_taken = |i| ordered.pairs().iter().any(|&(r, _)| r == i);
    let target_taken = |j| ordered.pairs().iter().any(|&(_, t)| t == j);
    instance
        .pairs()
        .filter(|&(i, j)| !robot_taken(i) && !target_taken(j))
        .map(|(i, j)| StoppingConstraint {
            pair: (i, j),
            cost_base: instance.neg_log_prob(i, j),
        })
        .collect()
}

struct Node {
    seq: Vec<Pair>,
    objective: f64,
}

/// Finds parameters closest to `nominal` under which the greedy outputs the
/// suggestion, within `epsilon` of the best achievable objective.
pub fn solve_inverse(
    instance: &ProblemInstance,
    suggestion: &Suggestion,
    nominal: &RiskParams,
    weights: &ObjectiveWeights,
    bounds: &ParamBounds,
    config: &InverseConfig,
) -> Result<InverseSolution, InverseError> {
    let started = Instant::now();
    if !bounds.contains(nominal) {
        return Err(ModelError::NominalOutOfBounds.into());
    }
    Suggestion::new(instance, suggestion.pairs().to_vec())?;
    let epsilon = match config.epsilon {
        Some(e) => e,
        None => ordered_gap_bound(config.max_depth, nominal, bounds, weights)?,
    };
    let m = suggestion.len();

    let mut stats = SearchStats::default();
    let mut edges = Vec::new();
    let mut best: Option<(f64, RiskParams, Vec<Pair>)> = None;
    let mut stack = vec![Node {
        seq: Vec::new(),
        objective: 0.0,
    }];

    let finish = |best: Option<(f64, RiskParams, Vec<Pair>)>,
                  mut stats: SearchStats,
                  edges: Vec<TreeEdge>| {
        stats.wall_time = started.elapsed();
        best.map(|(objective, params, seq)| {
            let ordering = Allocation::from_trusted(seq);
            let verified =
                verify_forward(instance, &params, &suggestion.reordered(&ordering)).matches;
            InverseSolution {
                params,
                objective,
                epsilon,
                ordering,
                verified,
                stats,
                edges,
            }
        })
    };

    while let Some(node) = stack.pop() {
        if node.seq.len() == m {
            continue;
        }
        let upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        if !node.seq.is_empty() && node.objective >= upper + epsilon {
            stats.pruned_bound += 1;
            continue;
        }
        stats.nodes_expanded += 1;

        let mut children = Vec::new();
        for &s in suggestion.pairs() {
            if node.seq.contains(&s) {
                continue;
            }
            let mut seq = node.seq.clone();
            seq.push(s);
            let ordered = Allocation::from_trusted(seq);
            let mut problem = OrderedProblem::new(instance, &ordered, nominal, weights, bounds)?;
            if config.strict_stop && ordered.len() == m {
                let leftovers: Vec<f64> =
                    strict_stopping_constraints(instance, &ordered, suggestion)
                        .iter()
                        .map(|c| c.cost_base)
                        .collect();
                problem = problem.with_stopping(&leftovers);
            }
            stats.subproblems_solved += 1;
            match solve_ordered_problem(&problem, config.max_depth, config.deadline) {
                Ok(sol) => {
                    if config.record_edges {
                        edges.push(TreeEdge {
                            prefix_len: ordered.len(),
                            parent_objective: node.objective,
                            child_objective: sol.objective,
                        });
                    }
                    children.push((sol.objective, sol.params, ordered.pairs().to_vec()));
                }
                Err(OrderedError::Infeasible) => stats.pruned_infeasible += 1,
                Err(OrderedError::TimedOut { .. }) => {
                    let partial = finish(best, stats.clone(), edges).map(Box::new);
                    stats.wall_time = started.elapsed();
                    return Err(InverseError::TimedOut { partial, stats });
                }
                Err(OrderedError::Model(e)) => return Err(e.into()),
            }
        }

        children.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut kept = Vec::new();
        for (objective, params, seq) in children {
            let upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
            if objective >= upper + epsilon {
                stats.pruned_bound += 1;
                continue;
            }
            if seq.len() == m && objective < upper {
                best = Some((objective, params, seq.clone()));
            }
            kept.push(Node { seq, objective });
        }
        // lowest objective ends on top of the stack
        stack.extend(kept.into_iter().rev());
        stats.peak_tree_size = stats.peak_tree_size.max(stack.len());
    }

    match finish(best, stats.clone(), edges) {
        Some(sol) => Ok(sol),
        None => {
            stats.wall_time = started.elapsed();
            Err(InverseError::Infeasible { stats })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::greedy_solve;
    use crate::ordered::solve_ordered;

    fn params(a: f64, b: f64, d: f64) -> RiskParams {
        RiskParams::new(a, b, d).unwrap()
    }

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

    #[test]
    fn identity_suggestion_recovers_nominal() {
        let inst = sample();
        let nominal = params(1.0, 1.0, 0.8);
        let (alloc, _) = greedy_solve(&inst, &nominal);
        let sugg = Suggestion::from_allocation(&alloc).unwrap();
        let sol = solve_inverse(
            &inst,
            &sugg,
            &nominal,
            &ObjectiveWeights::default(),
            &ParamBounds::default(),
            &InverseConfig::with_depth(4),
        )
        .unwrap();
        assert!(sol.objective <= 1e-9);
        assert_eq!(sol.params, nominal);
        assert!(sol.verified);
    }

    #[test]
    fn single_pair_matches_ordered_solver() {
        let inst = sample();
        let nominal = params(1.0, 1.0, 0.8);
        let w = ObjectiveWeights::default();
        let b = ParamBounds::default();
        let sugg = Suggestion::new(&inst, vec![(1, 1)]).unwrap();
        let full = solve_inverse(
            &inst,
            &sugg,
            &nominal,
            &w,
            &b,
            &InverseConfig::with_depth(5),
        )
        .unwrap();
        let ord = solve_ordered(
            &inst,
            &Allocation::new(&inst, vec![(1, 1)]).unwrap(),
            &nominal,
            &w,
            &b,
            5,
        )
        .unwrap();
        assert_eq!(full.objective, ord.objective);
        assert_eq!(full.params, ord.params);
        assert_eq!(full.stats.subproblems_solved, 1);
    }

    #[test]
    fn always_dominated_pair_is_infeasible() {
        // (1, 1) has both the larger reward and the smaller risk
        let inst = sample();
        let sugg = Suggestion::new(&inst, vec![(2, 2)]).unwrap();
        let res = solve_inverse(
            &inst,
            &sugg,
            &params(1.0, 1.0, 0.8),
            &ObjectiveWeights::default(),
            &ParamBounds::default(),
            &InverseConfig::with_depth(4),
        );
        assert!(matches!(res, Err(InverseError::Infeasible { .. })));
    }

    #[test]
    fn stopping_constraints_enumerate_leftovers() {
        let inst =
            ProblemInstance::new(vec![vec![1.0; 2]; 2], vec![vec![0.5, 0.6], vec![0.7, 0.8]])
                .unwrap();
        let sugg = Suggestion::new(&inst, vec![(0, 0)]).unwrap();
        let ordered = Allocation::new(&inst, vec![(0, 0)]).unwrap();
        let cons = strict_stopping_constraints(&inst, &ordered, &sugg);
        assert_eq!(cons.len(), 1);
        assert_eq!(cons[0].pair, (1, 1));

        let full = Suggestion::new(&inst, vec![(0, 0), (1, 1)]).unwrap();
        let ordered = Allocation::new(&inst, vec![(1, 1), (0, 0)]).unwrap();
        assert!(strict_stopping_constraints(&inst, &ordered, &full).is_empty());
    }

    #[test]
    fn nominal_outside_bounds_rejected() {
        let inst = sample();
        let sugg = Suggestion::new(&inst, vec![(0, 0)]).unwrap();
        let err = solve_inverse(
            &inst,
            &sugg,
            &params(5.0, 1.0, 0.8),
            &ObjectiveWeights::default(),
            &ParamBounds::default(),
            &InverseConfig::default(),
        );
        assert_eq!(
            err.unwrap_err(),
            InverseError::Model(ModelError::NominalOutOfBounds)
        );
    }

    #[test]
    fn expired_deadline_times_out() {
        let inst = sample();
        let sugg = Suggestion::new(&inst, vec![(0, 0), (1, 1)]).unwrap();
        let cfg = InverseConfig {
            deadline: Some(Instant::now()),
            ..InverseConfig::default()
        };
        let err = solve_inverse(
            &inst,
            &sugg,
            &params(1.0, 1.0, 0.8),
            &ObjectiveWeights::default(),
            &ParamBounds::default(),
            &cfg,
        );
        assert!(matches!(err, Err(InverseError::TimedOut { .. })));
    }
}
