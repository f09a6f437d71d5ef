//! Exhaustive grid baseline next to the branch-and-bound solver.
//!
//! `cargo run -p irmrta --release --example grid_oracle`

use std::time::Instant;

use irmrta::bench::make_trial;
use irmrta::{grid_inverse, solve_inverse, GridSpec, InverseConfig, ObjectiveWeights, ParamBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = ParamBounds::default();
    let weights = ObjectiveWeights::default();
    let trial = make_trial(6, 6, 42, &bounds)?;
    println!("suggestion {:?}", trial.suggestion.pairs());

    let t = Instant::now();
    let bb = solve_inverse(
        &trial.instance,
        &trial.suggestion,
        &trial.nominal,
        &weights,
        &bounds,
        &InverseConfig::with_depth(8),
    )?;
    println!("branch-and-bound: {:.5} in {:?}", bb.objective, t.elapsed());

    for n in [10, 25, 50] {
        let t = Instant::now();
        let grid = GridSpec::cubic(n)?;
        match grid_inverse(
            &trial.instance,
            &trial.suggestion,
            &trial.nominal,
            &weights,
            &bounds,
            &grid,
        )? {
            Some(r) => println!(
                "grid {n}^3: {:.5} (slack {:.4}) in {:?}",
                r.objective,
                r.slack,
                t.elapsed()
            ),
            None => println!("grid {n}^3: no point reproduces the suggestion"),
        }
    }
    Ok(())
}
