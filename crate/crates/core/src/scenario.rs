//! Target-capture instance generator.
//!
//! Robots and targets are discs in the unit square. A robot that is large
//! relative to its target is unlikely to be damaged during capture, and the
//! pair reward is the target value minus travel and expected repair costs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ModelError, Result};
use crate::io::InstanceFile;
use crate::model::{ObjectiveWeights, ParamBounds, ProblemInstance, RawInstance, RiskParams};

/// Probability that a robot of size `s_robot` stays intact capturing a
/// target of size `s_target`.
pub fn damage_free_prob(s_robot: f64, s_target: f64, k: f64) -> f64 {
    1.0 / (1.0 + (k * (s_target - s_robot)).exp())
}

/// Pair reward: capture value minus scaled motion cost and expected repair.
pub fn capture_reward(r_j: f64, xi_c: f64, c_hat_ij: f64, xi_d: f64, p_ij: f64, d_i: f64) -> f64 {
    r_j - xi_c * c_hat_ij - xi_d * (1.0 - p_ij) * d_i
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n_r: usize,
    pub n_t: usize,
    pub seed: u64,
    pub size_range: [f64; 2],
    /// Logistic steepness of the damage model.
    pub k: f64,
    pub xi_c: f64,
    pub xi_d: f64,
    /// Range the per-robot repair cost is drawn from.
    pub repair_range: [f64; 2],
    /// Target value per unit of target size.
    pub value_per_size: f64,
    /// Smallest pair reward tolerated before target values are shifted up.
    pub reward_floor: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_r: 8,
            n_t: 8,
            seed: 0,
            size_range: [0.5, 1.5],
            k: 5.0,
            xi_c: 10.0,
            xi_d: 1.0,
            repair_range: [10.0, 30.0],
            value_per_size: 100.0,
            reward_floor: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn new(n_r: usize, n_t: usize, seed: u64) -> Self {
        Self {
            n_r,
            n_t,
            seed,
            ..Self::default()
        }
    }
}

/// Disc positions and sizes, for drawing the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub robot_positions: Vec<[f64; 2]>,
    pub target_positions: Vec<[f64; 2]>,
    pub robot_sizes: Vec<f64>,
    pub target_sizes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub instance: ProblemInstance,
    pub config: ScenarioConfig,
    pub geometry: Geometry,
    pub repair_costs: Vec<f64>,
    pub target_values: Vec<f64>,
    /// Amount added to every target value to respect the reward floor.
    pub reward_shift: f64,
}

pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    if config.n_r == 0 || config.n_t == 0 {
        return Err(ModelError::InvalidInstance(
            "robot and target counts must be positive".into(),
        ));
    }
    let [s_lo, s_hi] = config.size_range;
    let [d_lo, d_hi] = config.repair_range;
    let positive = [
        s_lo,
        config.k,
        config.value_per_size,
        d_lo,
        config.reward_floor,
    ];
    if positive.iter().any(|v| !(*v > 0.0))
        || s_hi < s_lo
        || d_hi < d_lo
        || config.xi_c < 0.0
        || config.xi_d < 0.0
    {
        return Err(ModelError::InvalidInstance(
            "scenario parameters must be positive".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let point = |rng: &mut ChaCha8Rng| [rng.gen::<f64>(), rng.gen::<f64>()];
    let robot_positions: Vec<_> = (0..config.n_r).map(|_| point(&mut rng)).collect();
    let target_positions: Vec<_> = (0..config.n_t).map(|_| point(&mut rng)).collect();
    let robot_sizes: Vec<f64> = (0..config.n_r)
        .map(|_| rng.gen_range(s_lo..=s_hi))
        .collect();
    let target_sizes: Vec<f64> = (0..config.n_t)
        .map(|_| rng.gen_range(s_lo..=s_hi))
        .collect();
    let repair_costs: Vec<f64> = (0..config.n_r)
        .map(|_| rng.gen_range(d_lo..=d_hi))
        .collect();
    let mut target_values: Vec<f64> = target_sizes
        .iter()
        .map(|s| config.value_per_size * s)
        .collect();

    let probs: Vec<Vec<f64>> = robot_sizes
        .iter()
        .map(|&si| {
            target_sizes
                .iter()
                .map(|&sj| damage_free_prob(si, sj, config.k))
                .collect()
        })
        .collect();
    let rewards_for = |values: &[f64]| -> Vec<Vec<f64>> {
        (0..config.n_r)
            .map(|i| {
                (0..config.n_t)
                    .map(|j| {
                        let [rx, ry] = robot_positions[i];
                        let [tx, ty] = target_positions[j];
                        let travel = (rx - tx).hypot(ry - ty);
                        capture_reward(
                            values[j],
                            config.xi_c,
                            travel,
                            config.xi_d,
                            probs[i][j],
                            repair_costs[i],
                        )
                    })
                    .collect()
            })
            .collect()
    };
    let mut rewards = rewards_for(&target_values);
    let lowest = rewards
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let reward_shift = (config.reward_floor - lowest).max(0.0);
    if reward_shift > 0.0 {
        target_values.iter_mut().for_each(|v| *v += reward_shift);
        rewards = rewards_for(&target_values);
    }

    let instance = ProblemInstance::try_from(RawInstance {
        n_r: config.n_r,
        n_t: config.n_t,
        rewards,
        probs,
    })?;
    Ok(Scenario {
        instance,
        config: config.clone(),
        geometry: Geometry {
            robot_positions,
            target_positions,
            robot_sizes,
            target_sizes,
        },
        repair_costs,
        target_values,
        reward_shift,
    })
}

/// A layout for an instance that came without one.
///
/// Sizes fit `k (s_target - s_robot) = ln(1/p - 1)` in the least-squares
/// sense (an additive two-way model) and are shifted so the smallest is
/// 0.5. Robots sit in a column on the left, targets on the right.
pub fn derived_geometry(instance: &ProblemInstance, k: f64) -> Geometry {
    let (n_r, n_t) = (instance.n_robots(), instance.n_targets());
    let gap = |i: usize, j: usize| (1.0 / instance.prob(i, j) - 1.0).ln() / k;
    let grand = instance.pairs().map(|(i, j)| gap(i, j)).sum::<f64>() / (n_r * n_t) as f64;
    let mut robot_sizes: Vec<f64> = (0..n_r)
        .map(|i| grand - (0..n_t).map(|j| gap(i, j)).sum::<f64>() / n_t as f64)
        .collect();
    let mut target_sizes: Vec<f64> = (0..n_t)
        .map(|j| (0..n_r).map(|i| gap(i, j)).sum::<f64>() / n_r as f64)
        .collect();
    let lowest = robot_sizes
        .iter()
        .chain(&target_sizes)
        .copied()
        .fold(f64::INFINITY, f64::min);
    robot_sizes
        .iter_mut()
        .chain(target_sizes.iter_mut())
        .for_each(|s| *s += 0.5 - lowest);
    let column = |x: f64, n: usize| {
        (0..n)
            .map(|i| [x, (i as f64 + 0.5) / n as f64])
            .collect::<Vec<_>>()
    };
    Geometry {
        robot_positions: column(0.15, n_r),
        target_positions: column(0.85, n_t),
        robot_sizes,
        target_sizes,
    }
}

const QUALITATIVE_JSON: &str = include_str!("../fixtures/qualitative.json");
const QUALITATIVE_SHA256: &str = "0d9c33d6772cd367af3427382d1c51c2fb8c93069f9dda593b00bae90617431c";

/// The ten-robot, four-target demonstration instance with its nominal
/// parameters and objective weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QualitativeFixture {
    pub instance: ProblemInstance,
    pub nominal: RiskParams,
    pub weights: ObjectiveWeights,
    pub bounds: ParamBounds,
}

/// Raw fixture file contents.
pub fn qualitative_fixture_json() -> &'static str {
    QUALITATIVE_JSON
}

/// Loads the embedded fixture.
///
/// # Panics
///
/// Panics if the embedded file does not match its recorded checksum.
pub fn load_fixture_qualitative() -> QualitativeFixture {
    let digest = format!("{:x}", Sha256::digest(QUALITATIVE_JSON.as_bytes()));
    assert_eq!(
        digest, QUALITATIVE_SHA256,
        "embedded qualitative fixture is corrupted"
    );
    let file: InstanceFile =
        serde_json::from_str(QUALITATIVE_JSON).expect("embedded fixture parses");
    QualitativeFixture {
        instance: file.instance,
        nominal: file.params.expect("fixture carries nominal parameters"),
        weights: file.weights.expect("fixture carries weights"),
        bounds: file.bounds.expect("fixture carries bounds"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn damage_examples() {
        assert_eq!(damage_free_prob(1.0, 1.0, 5.0), 0.5);
        assert!(damage_free_prob(10.0, 0.1, 5.0) > 0.999_999);
        assert!((damage_free_prob(0.0, 3f64.ln(), 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn reward_examples() {
        assert_eq!(capture_reward(10.0, 0.0, 2.0, 0.0, 0.8, 4.0), 10.0);
        assert!((capture_reward(10.0, 1.0, 2.0, 0.5, 0.8, 4.0) - 7.6).abs() < 1e-12);
        assert!((capture_reward(10.0, 1.0, 2.0, 0.5, 1.0 - 1e-12, 4.0) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ScenarioConfig::new(6, 4, 42);
        assert_eq!(
            generate_scenario(&cfg).unwrap(),
            generate_scenario(&cfg).unwrap()
        );
        assert_ne!(
            generate_scenario(&cfg).unwrap(),
            generate_scenario(&ScenarioConfig::new(6, 4, 43)).unwrap()
        );
    }

    #[test]
    fn equal_sizes_give_even_odds() {
        let cfg = ScenarioConfig {
            size_range: [1.0, 1.0],
            ..ScenarioConfig::new(3, 3, 7)
        };
        let sc = generate_scenario(&cfg).unwrap();
        assert!(sc
            .instance
            .pairs()
            .all(|(i, j)| sc.instance.prob(i, j) == 0.5));
    }

    #[test]
    fn floor_shift_applies() {
        let cfg = ScenarioConfig {
            value_per_size: 0.01,
            ..ScenarioConfig::new(5, 5, 1)
        };
        let sc = generate_scenario(&cfg).unwrap();
        assert!(sc.reward_shift > 0.0);
        let lowest = sc
            .instance
            .pairs()
            .map(|(i, j)| sc.instance.reward(i, j))
            .fold(f64::INFINITY, f64::min);
        assert!((lowest - cfg.reward_floor).abs() < 1e-9);
    }

    #[test]
    fn zero_robots_rejected() {
        assert!(generate_scenario(&ScenarioConfig::new(0, 3, 1)).is_err());
    }

    #[test]
    fn fixture_values() {
        let fx = load_fixture_qualitative();
        assert_eq!((fx.instance.n_robots(), fx.instance.n_targets()), (10, 4));
        assert_eq!(fx.instance.prob(0, 0), 0.85);
        assert_eq!(fx.instance.prob(0, 3), 0.41);
        assert_eq!(fx.instance.prob(2, 1), 0.85);
        assert_eq!(fx.instance.reward(0, 0), 67.00);
        assert_eq!(fx.instance.reward(3, 2), 348.87);
        assert_eq!(fx.instance.reward(9, 3), 490.60);
        assert_eq!(fx.nominal, RiskParams::new(1.0, 1.0, 0.8).unwrap());
        assert_eq!(fx.weights, ObjectiveWeights::new(1.0, 1.0, 20.0).unwrap());
        assert!(fx
            .instance
            .pairs()
            .all(|(i, j)| fx.instance.prob(i, j) > 0.0 && fx.instance.prob(i, j) < 1.0));
    }

    #[test]
    fn derived_geometry_recovers_generated_sizes() {
        let sc = generate_scenario(&ScenarioConfig::new(4, 3, 5)).unwrap();
        let g = derived_geometry(&sc.instance, sc.config.k);
        let shift = g.robot_sizes[0] - sc.geometry.robot_sizes[0];
        for (a, b) in g.robot_sizes.iter().zip(&sc.geometry.robot_sizes) {
            assert!((a - b - shift).abs() < 1e-9);
        }
        for (a, b) in g.target_sizes.iter().zip(&sc.geometry.target_sizes) {
            assert!((a - b - shift).abs() < 1e-9);
        }
        let fx = derived_geometry(&load_fixture_qualitative().instance, 5.0);
        assert_eq!((fx.robot_sizes.len(), fx.target_positions.len()), (10, 4));
        assert!(fx.robot_sizes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fixture_round_trip_is_bitwise() {
        let fx = load_fixture_qualitative();
        let json = serde_json::to_string(&fx.instance).unwrap();
        let back: ProblemInstance = serde_json::from_str(&json).unwrap();
        assert!(back.pairs().all(|(i, j)| back.prob(i, j).to_bits()
            == fx.instance.prob(i, j).to_bits()
            && back.reward(i, j).to_bits() == fx.instance.reward(i, j).to_bits()));
    }

    proptest! {
        #[test]
        fn damage_monotone(sr in 0.1f64..2.0, st in 0.1f64..2.0, d in 0.01f64..0.5, k in 0.5f64..10.0) {
            prop_assert!(damage_free_prob(sr + d, st, k) > damage_free_prob(sr, st, k));
            prop_assert!(damage_free_prob(sr, st + d, k) < damage_free_prob(sr, st, k));
        }

        #[test]
        fn generated_instances_are_valid(n_r in 1usize..10, n_t in 1usize..10, seed in any::<u64>()) {
            let sc = generate_scenario(&ScenarioConfig::new(n_r, n_t, seed)).unwrap();
            prop_assert!(crate::model::validate_instance(&sc.instance.to_raw()).is_empty());
        }
    }
}
