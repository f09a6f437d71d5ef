//! The bundled 10x4 fixture: derive a suggestion under one risk profile,
//! then recover parameters from the default nominal.
//!
//! `cargo run -p irmrta --release --example qualitative_fixture`

use irmrta::{
    greedy_solve, load_fixture_qualitative, solve_inverse, InverseConfig, RiskParams, Suggestion,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = load_fixture_qualitative();
    let profile = RiskParams::new(0.49, 0.36, 0.75)?;
    let (picked, _) = greedy_solve(&fx.instance, &profile);
    let suggestion = Suggestion::from_allocation(&picked)?;
    println!("suggestion under {profile:?}: {:?}", suggestion.pairs());

    let reference = fx.weights.distance(&fx.nominal, &profile);
    let sol = solve_inverse(
        &fx.instance,
        &suggestion,
        &fx.nominal,
        &fx.weights,
        &fx.bounds,
        &InverseConfig::with_depth(8),
    )?;
    println!(
        "recovered alpha {:.4} beta {:.4} delta {:.4}",
        sol.params.alpha(),
        sol.params.beta(),
        sol.params.delta()
    );
    println!(
        "objective {:.4} vs distance to the generating profile {reference:.4}; verified {}",
        sol.objective, sol.verified
    );
    Ok(())
}
