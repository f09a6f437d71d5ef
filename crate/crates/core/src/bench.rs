//! Benchmark harness: random scenarios, pseudo-human suggestions, inverse
//! solves across depths and an optional grid baseline.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::forward::greedy_solve;
use crate::inverse::{solve_inverse, InverseConfig, InverseError};
use crate::model::{
    Interval, ObjectiveWeights, ParamBounds, ProblemInstance, RiskParams, Suggestion,
};
use crate::oracle::{grid_inverse, GridSpec};
use crate::scenario::{generate_scenario, ScenarioConfig};

pub const CSV_HEADER: [&str; 11] = [
    "n_r",
    "n_t",
    "m",
    "depth",
    "objective",
    "oracle_obj",
    "norm_obj",
    "epsilon",
    "wall_ms",
    "nodes",
    "status",
];

/// Draws beyond this many empty suggestions abort the trial.
const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Square instance sizes; each trial runs once per size.
    pub sizes: Vec<usize>,
    pub depths: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub bounds: ParamBounds,
    pub weights: ObjectiveWeights,
    /// Grid baseline; `None` skips it.
    pub oracle: Option<GridSpec>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![4, 6, 8],
            depths: (2..=10).collect(),
            trials: 20,
            seed: 0,
            bounds: ParamBounds::default(),
            weights: ObjectiveWeights::default(),
            oracle: Some(GridSpec::default()),
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchStatus {
    Ok,
    /// Solved, but the greedy at the recovered parameters runs past the
    /// suggestion.
    Unverified,
    Infeasible,
    TimedOut,
}

/// One CSV row. `m` is the suggestion size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n_r: usize,
    pub n_t: usize,
    pub m: usize,
    pub depth: u32,
    pub objective: Option<f64>,
    pub oracle_obj: Option<f64>,
    pub norm_obj: Option<f64>,
    pub epsilon: f64,
    pub wall_ms: f64,
    pub nodes: usize,
    pub status: BenchStatus,
}

/// A scenario paired with a suggestion the greedy produces at some other
/// parameters, so the inverse problem is feasible by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchTrial {
    pub instance: ProblemInstance,
    pub nominal: RiskParams,
    pub perturbed: RiskParams,
    pub suggestion: Suggestion,
    /// Perturbed draws discarded because the greedy picked nothing.
    pub resampled: usize,
}

fn uniform_in(rng: &mut ChaCha8Rng, iv: Interval) -> f64 {
    if iv.width() == 0.0 {
        iv.lo
    } else {
        rng.gen_range(iv.lo..=iv.hi)
    }
}

fn random_params(rng: &mut ChaCha8Rng, bounds: &ParamBounds) -> RiskParams {
    RiskParams::new(
        uniform_in(rng, bounds.alpha()),
        uniform_in(rng, bounds.beta()),
        uniform_in(rng, bounds.delta()),
    )
    .expect("bounds admit only valid parameters")
}

pub fn trial_seed(seed: u64, size: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((size as u64) << 32) | trial as u64);
    rng.gen()
}

/// Builds the scenario, nominal parameters and pseudo-human suggestion of
/// one trial from its seed.
pub fn make_trial(n_r: usize, n_t: usize, seed: u64, bounds: &ParamBounds) -> Result<BenchTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenario = generate_scenario(&ScenarioConfig::new(n_r, n_t, rng.gen()))?;
    let nominal = random_params(&mut rng, bounds);
    for resampled in 0..MAX_RESAMPLES {
        let perturbed = random_params(&mut rng, bounds);
        if perturbed == nominal {
            continue;
        }
        let (alloc, _) = greedy_solve(&scenario.instance, &perturbed);
        if let Ok(suggestion) = Suggestion::from_allocation(&alloc) {
            return Ok(BenchTrial {
                instance: scenario.instance,
                nominal,
                perturbed,
                suggestion,
                resampled,
            });
        }
    }
    Err(ModelError::InvalidInstance(
        "no parameter draw in bounds yields a non-empty allocation".into(),
    ))
}

fn run_trial(config: &BenchConfig, size: usize, trial: usize) -> Result<Vec<BenchRecord>> {
    let t = make_trial(
        size,
        size,
        trial_seed(config.seed, size, trial),
        &config.bounds,
    )?;
    let oracle_obj = match &config.oracle {
        Some(grid) => grid_inverse(
            &t.instance,
            &t.suggestion,
            &t.nominal,
            &config.weights,
            &config.bounds,
            grid,
        )?
        .map(|r| r.objective),
        None => None,
    };
    let mut rows = Vec::with_capacity(config.depths.len());
    for &depth in &config.depths {
        let started = Instant::now();
        let outcome = solve_inverse(
            &t.instance,
            &t.suggestion,
            &t.nominal,
            &config.weights,
            &config.bounds,
            &InverseConfig::with_depth(depth),
        );
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let (objective, epsilon, nodes, status) = match outcome {
            Ok(sol) => {
                let status = if sol.verified {
                    BenchStatus::Ok
                } else {
                    BenchStatus::Unverified
                };
                (
                    Some(sol.objective),
                    sol.epsilon,
                    sol.stats.peak_tree_size,
                    status,
                )
            }
            Err(InverseError::Infeasible { stats }) => (
                None,
                f64::NAN,
                stats.peak_tree_size,
                BenchStatus::Infeasible,
            ),
            Err(InverseError::TimedOut { partial, stats }) => (
                partial.map(|p| p.objective),
                f64::NAN,
                stats.peak_tree_size,
                BenchStatus::TimedOut,
            ),
            Err(InverseError::Model(e)) => return Err(e),
        };
        let norm_obj = match (objective, oracle_obj) {
            (Some(o), Some(g)) if g > 0.0 => Some(o / g),
            (Some(o), Some(_)) => Some(if o == 0.0 { 1.0 } else { f64::INFINITY }),
            _ => None,
        };
        rows.push(BenchRecord {
            n_r: size,
            n_t: size,
            m: t.suggestion.len(),
            depth,
            objective,
            oracle_obj,
            norm_obj,
            epsilon,
            wall_ms,
            nodes,
            status,
        });
    }
    Ok(rows)
}

/// Runs every (size, trial) pair. Rows are ordered by size, trial, depth
/// regardless of scheduling.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if config.sizes.contains(&0) || config.depths.iter().any(|&d| d < 2) {
        return Err(ModelError::InvalidInstance(
            "sizes must be positive and depths at least 2".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ModelError::InvalidInstance(format!("worker pool: {e}")))?;
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let per_trial: Vec<Result<Vec<BenchRecord>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, t)| run_trial(config, s, t))
            .collect()
    });
    let mut out = Vec::new();
    for rows in per_trial {
        out.extend(rows?);
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Median of the normalized objectives recorded at `depth`.
pub fn median_normalized(records: &[BenchRecord], depth: u32) -> Option<f64> {
    let mut vals: Vec<f64> = records
        .iter()
        .filter(|r| r.depth == depth)
        .filter_map(|r| r.norm_obj)
        .collect();
    if vals.is_empty() {
        return None;
    }
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    Some(if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    })
}
