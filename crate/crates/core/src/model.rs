//! Domain types shared by the forward and inverse solvers.
//!
//! Matrices are stored row-major with one row per robot and one column per
//! target. Every probability is strictly inside `(0, 1)`: the inverse
//! machinery works with `ln(-ln p)`, which does not exist at the endpoints,
//! so such instances are rejected at load time instead of being clamped.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// A `(robot, target)` assignment.
pub type Pair = (usize, usize);

/// Relative tolerance under which two greedy scores count as tied.
pub const TIE_REL_TOL: f64 = 1e-9;
/// Absolute slack granted to the knapsack comparison in the greedy.
pub const BUDGET_ABS_TOL: f64 = 1e-12;

/// Forward problem data: rewards and intact probabilities per robot/target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ProblemInstance {
    n_r: usize,
    n_t: usize,
    rewards: Vec<f64>,
    probs: Vec<f64>,
}

/// Unchecked instance payload as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawInstance {
    pub n_r: usize,
    pub n_t: usize,
    pub rewards: Vec<Vec<f64>>,
    pub probs: Vec<Vec<f64>>,
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// JSON-style path of the offending field, e.g. `probs[0][0]`.
    pub field: String,
    pub cell: Option<Pair>,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Checks every instance invariant and reports all violations found.
pub fn validate_instance(raw: &RawInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    if raw.n_r == 0 {
        out.push(Violation {
            field: "n_r".into(),
            cell: None,
            rule: "n_r > 0",
        });
    }
    if raw.n_t == 0 {
        out.push(Violation {
            field: "n_t".into(),
            cell: None,
            rule: "n_t > 0",
        });
    }
    for (name, matrix) in [("rewards", &raw.rewards), ("probs", &raw.probs)] {
        if matrix.len() != raw.n_r {
            out.push(Violation {
                field: name.into(),
                cell: None,
                rule: "row count equals n_r",
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != raw.n_t {
                out.push(Violation {
                    field: format!("{name}[{i}]"),
                    cell: None,
                    rule: "column count equals n_t",
                });
            }
        }
    }
    for (i, row) in raw.rewards.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                out.push(Violation {
                    field: format!("rewards[{i}][{j}]"),
                    cell: Some((i, j)),
                    rule: "r > 0",
                });
            }
        }
    }
    for (i, row) in raw.probs.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let rule = if p.is_nan() || p <= 0.0 {
                Some("p strictly > 0")
            } else if p >= 1.0 {
                Some("p strictly < 1")
            } else {
                None
            };
            if let Some(rule) = rule {
                out.push(Violation {
                    field: format!("probs[{i}][{j}]"),
                    cell: Some((i, j)),
                    rule,
                });
            }
        }
    }
    out
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = ModelError;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let violations = validate_instance(&raw);
        if let Some(v) = violations.first() {
            return Err(ModelError::InvalidInstance(v.to_string()));
        }
        Ok(Self {
            n_r: raw.n_r,
            n_t: raw.n_t,
            rewards: raw.rewards.into_iter().flatten().collect(),
            probs: raw.probs.into_iter().flatten().collect(),
        })
    }
}

impl From<ProblemInstance> for RawInstance {
    fn from(inst: ProblemInstance) -> Self {
        Self {
            n_r: inst.n_r,
            n_t: inst.n_t,
            rewards: inst.rewards.chunks(inst.n_t).map(<[f64]>::to_vec).collect(),
            probs: inst.probs.chunks(inst.n_t).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl ProblemInstance {
    /// Builds an instance from nested row-major matrices.
    pub fn new(rewards: Vec<Vec<f64>>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let n_r = rewards.len();
        let n_t = rewards.first().map_or(0, Vec::len);
        RawInstance {
            n_r,
            n_t,
            rewards,
            probs,
        }
        .try_into()
    }

    pub fn n_robots(&self) -> usize {
        self.n_r
    }

    pub fn n_targets(&self) -> usize {
        self.n_t
    }

    /// Largest number of pairs any allocation can hold.
    pub fn max_pairs(&self) -> usize {
        self.n_r.min(self.n_t)
    }

    #[inline]
    pub fn reward(&self, robot: usize, target: usize) -> f64 {
        self.rewards[robot * self.n_t + target]
    }

    #[inline]
    pub fn prob(&self, robot: usize, target: usize) -> f64 {
        self.probs[robot * self.n_t + target]
    }

    /// `-ln p` for one pair; always strictly positive.
    #[inline]
    pub fn neg_log_prob(&self, robot: usize, target: usize) -> f64 {
        -self.prob(robot, target).ln()
    }

    pub fn to_raw(&self) -> RawInstance {
        self.clone().into()
    }

    /// Iterates over all pairs in robot-major order.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.n_r).flat_map(move |i| (0..self.n_t).map(move |j| (i, j)))
    }
}

/// The behavioral risk triple: Prelec curvature, Prelec scale and the
/// survival threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct RiskParams {
    alpha: f64,
    beta: f64,
    delta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    delta: f64,
}

impl TryFrom<RawParams> for RiskParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.alpha, raw.beta, raw.delta)
    }
}

impl RiskParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ModelError::InvalidBeta(beta));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ModelError::InvalidDelta(delta));
        }
        Ok(Self { alpha, beta, delta })
    }

    /// Rational perception (`w(p) = p`) with the given threshold.
    pub fn rational(delta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, delta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl fmt::Display for RiskParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(alpha={:.6}, beta={:.6}, delta={:.6})",
            self.alpha, self.beta, self.delta
        )
    }
}

/// Closed interval `[lo, hi]`; serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the nearest point of the interval.
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    /// `i`-th of `n` uniform cell centers.
    pub fn cell_center(&self, i: usize, n: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width() / n as f64
    }
}

/// Admissible ranges for the recovered parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds", into = "RawBounds")]
pub struct ParamBounds {
    alpha: Interval,
    beta: Interval,
    delta: Interval,
}

#[derive(Serialize, Deserialize)]
struct RawBounds {
    alpha: Interval,
    beta: Interval,
    delta: Interval,
}

impl TryFrom<RawBounds> for ParamBounds {
    type Error = ModelError;

    fn try_from(raw: RawBounds) -> Result<Self> {
        Self::new(raw.alpha, raw.beta, raw.delta)
    }
}

impl From<ParamBounds> for RawBounds {
    fn from(b: ParamBounds) -> Self {
        Self {
            alpha: b.alpha,
            beta: b.beta,
            delta: b.delta,
        }
    }
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            alpha: Interval::new(0.1, 2.0),
            beta: Interval::new(0.1, 2.0),
            delta: Interval::new(0.5, 0.99),
        }
    }
}

impl ParamBounds {
    pub fn new(alpha: Interval, beta: Interval, delta: Interval) -> Result<Self> {
        let check = |name, iv: Interval, upper: f64| {
            if iv.lo > 0.0 && iv.lo <= iv.hi && iv.hi < upper {
                Ok(())
            } else {
                Err(ModelError::InvalidInterval {
                    name,
                    lo: iv.lo,
                    hi: iv.hi,
                })
            }
        };
        check("alpha", alpha, f64::INFINITY)?;
        check("beta", beta, f64::INFINITY)?;
        check("delta", delta, 1.0)?;
        Ok(Self { alpha, beta, delta })
    }

    pub fn alpha(&self) -> Interval {
        self.alpha
    }

    pub fn beta(&self) -> Interval {
        self.beta
    }

    pub fn delta(&self) -> Interval {
        self.delta
    }

    pub fn contains(&self, params: &RiskParams) -> bool {
        self.alpha.contains(params.alpha)
            && self.beta.contains(params.beta)
            && self.delta.contains(params.delta)
    }
}

/// Weights of the parameter-distance objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct ObjectiveWeights {
    pub(crate) w_alpha: f64,
    pub(crate) w_beta: f64,
    pub(crate) w_delta: f64,
}

#[derive(Deserialize)]
struct RawWeights {
    w_alpha: f64,
    w_beta: f64,
    w_delta: f64,
}

impl TryFrom<RawWeights> for ObjectiveWeights {
    type Error = ModelError;

    fn try_from(raw: RawWeights) -> Result<Self> {
        Self::new(raw.w_alpha, raw.w_beta, raw.w_delta)
    }
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            w_alpha: 1.0,
            w_beta: 1.0,
            w_delta: 20.0,
        }
    }
}

impl ObjectiveWeights {
    pub fn new(w_alpha: f64, w_beta: f64, w_delta: f64) -> Result<Self> {
        let ws = [w_alpha, w_beta, w_delta];
        if ws.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || ws.iter().all(|w| *w == 0.0) {
            return Err(ModelError::InvalidWeights);
        }
        Ok(Self {
            w_alpha,
            w_beta,
            w_delta,
        })
    }

    pub fn w_alpha(&self) -> f64 {
        self.w_alpha
    }

    pub fn w_beta(&self) -> f64 {
        self.w_beta
    }

    pub fn w_delta(&self) -> f64 {
        self.w_delta
    }

    /// Weighted L1 distance between two parameter triples.
    pub fn distance(&self, from: &RiskParams, to: &RiskParams) -> f64 {
        self.w_alpha * (to.alpha - from.alpha).abs()
            + self.w_beta * (to.beta - from.beta).abs()
            + self.w_delta * (to.delta - from.delta).abs()
    }
}

fn check_pairs(instance: &ProblemInstance, pairs: &[Pair]) -> Result<()> {
    let mut robots = vec![false; instance.n_robots()];
    let mut targets = vec![false; instance.n_targets()];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if i >= instance.n_robots() || j >= instance.n_targets() {
            return Err(ModelError::InvalidAllocation(format!(
                "pairs[{k}]: ({i}, {j}) out of range"
            )));
        }
        if std::mem::replace(&mut robots[i], true) {
            return Err(ModelError::InvalidAllocation(format!(
                "pairs[{k}]: robot {i} used twice"
            )));
        }
        if std::mem::replace(&mut targets[j], true) {
            return Err(ModelError::InvalidAllocation(format!(
                "pairs[{k}]: target {j} used twice"
            )));
        }
    }
    Ok(())
}

/// Ordered set of pairs, as produced by the greedy or fixed by an inverse
/// subproblem.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    pairs: Vec<Pair>,
}

impl Allocation {
    pub fn new(instance: &ProblemInstance, pairs: Vec<Pair>) -> Result<Self> {
        check_pairs(instance, &pairs)?;
        Ok(Self { pairs })
    }

    pub(crate) fn from_trusted(pairs: Vec<Pair>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Set equality, ignoring order.
    pub fn same_set(&self, pairs: &[Pair]) -> bool {
        self.pairs.len() == pairs.len() && pairs.iter().all(|p| self.pairs.contains(p))
    }
}

/// A human-suggested, unordered set of pairs.
///
/// The stored order carries no meaning for the inverse problem; the forward
/// verifier uses it only to rank suggestion pairs on exact score ties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pairs: Vec<Pair>,
}

impl Suggestion {
    pub fn new(instance: &ProblemInstance, pairs: Vec<Pair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(ModelError::InvalidAllocation("suggestion is empty".into()));
        }
        check_pairs(instance, &pairs)?;
        Ok(Self { pairs })
    }

    pub fn from_allocation(allocation: &Allocation) -> Result<Self> {
        if allocation.is_empty() {
            return Err(ModelError::InvalidAllocation("suggestion is empty".into()));
        }
        Ok(Self {
            pairs: allocation.pairs.clone(),
        })
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.pairs.contains(&pair)
    }

    /// Same pairs, listed in the order of `ordering` (used for tie ranking).
    pub fn reordered(&self, ordering: &Allocation) -> Self {
        debug_assert!(ordering.same_set(&self.pairs));
        Self {
            pairs: ordering.pairs.clone(),
        }
    }
}

/// Prelec probability weighting `w(p) = exp(-beta (-ln p)^alpha)`.
pub fn prelec_weight(p: f64, params: &RiskParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::ProbabilityOutOfRange(p));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok((-params.beta * (-p.ln()).powf(params.alpha)).exp())
}

/// Knapsack weight of one pair, `beta (-ln p)^alpha`.
pub fn allocation_cost(p: f64, params: &RiskParams) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::ProbabilityOutOfRange(p));
    }
    Ok(params.beta * (-p.ln()).powf(params.alpha))
}

/// Knapsack capacity `-ln delta`.
pub fn budget(params: &RiskParams) -> f64 {
    -params.delta.ln()
}
