//! Prelec probability weighting and the allocation cost it induces.
//!
//! `cargo run -p irmrta --example prelec_weighting`

use irmrta::{allocation_cost, budget, prelec_weight, RiskParams};

fn main() -> irmrta::Result<()> {
    let profiles = [
        ("rational", RiskParams::rational(0.8)?),
        ("pessimistic", RiskParams::new(0.5, 1.5, 0.8)?),
        ("optimistic", RiskParams::new(1.6, 0.6, 0.8)?),
    ];
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "p", profiles[0].0, profiles[1].0, profiles[2].0
    );
    for k in 1..10 {
        let p = k as f64 / 10.0;
        let w: Vec<f64> = profiles
            .iter()
            .map(|(_, t)| prelec_weight(p, t))
            .collect::<irmrta::Result<_>>()?;
        println!("{p:>6.2} {:>12.4} {:>12.4} {:>12.4}", w[0], w[1], w[2]);
    }

    let theta = profiles[1].1;
    println!("\nbudget -ln(delta) = {:.4}", budget(&theta));
    for p in [0.95, 0.8, 0.5] {
        // cost is -ln of the weighted probability
        println!("cost(p={p}) = {:.4}", allocation_cost(p, &theta)?);
    }
    Ok(())
}
