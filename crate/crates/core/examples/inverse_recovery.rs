//! Recover risk parameters that make the greedy reproduce a suggestion.
//!
//! `cargo run -p irmrta --release --example inverse_recovery`

use irmrta::scenario::{generate_scenario, ScenarioConfig};
use irmrta::{
    greedy_solve, solve_inverse, verify_forward, InverseConfig, ObjectiveWeights, ParamBounds,
    RiskParams, Suggestion,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let instance = generate_scenario(&ScenarioConfig::new(8, 8, 21))?.instance;
    let nominal = RiskParams::new(1.0, 1.0, 0.8)?;
    let weights = ObjectiveWeights::default();
    let bounds = ParamBounds::default();

    // A "human" whose risk attitude differs from the nominal.
    let hidden = RiskParams::new(0.7, 0.5, 0.55)?;
    let (picked, _) = greedy_solve(&instance, &hidden);
    let suggestion = Suggestion::from_allocation(&picked)?;
    println!("suggestion {:?}", suggestion.pairs());

    for strict_stop in [false, true] {
        let config = InverseConfig {
            strict_stop,
            ..InverseConfig::with_depth(8)
        };
        let sol = solve_inverse(&instance, &suggestion, &nominal, &weights, &bounds, &config)?;
        let check = verify_forward(&instance, &sol.params, &suggestion);
        println!(
            "strict_stop={strict_stop}: alpha {:.4} beta {:.4} delta {:.4}  objective {:.4} (eps {:.4})",
            sol.params.alpha(),
            sol.params.beta(),
            sol.params.delta(),
            sol.objective,
            sol.epsilon
        );
        println!(
            "  ordering {:?}\n  greedy reproduces: {}  nodes {}  subproblems {}",
            sol.ordering.pairs(),
            check.matches,
            sol.stats.nodes_expanded,
            sol.stats.subproblems_solved
        );
    }
    Ok(())
}
