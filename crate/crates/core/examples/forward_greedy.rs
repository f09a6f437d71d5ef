//! Greedy risk-budgeted allocation with its step trace.
//!
//! `cargo run -p irmrta --example forward_greedy`

use irmrta::{greedy_solve, ProblemInstance, RiskParams};

fn main() -> irmrta::Result<()> {
    let instance = ProblemInstance::new(
        vec![
            vec![40.0, 25.0, 10.0],
            vec![30.0, 35.0, 20.0],
            vec![15.0, 20.0, 45.0],
        ],
        vec![
            vec![0.9, 0.7, 0.95],
            vec![0.6, 0.85, 0.9],
            vec![0.8, 0.75, 0.5],
        ],
    )?;

    for delta in [0.9, 0.7, 0.5] {
        let theta = RiskParams::new(0.8, 1.2, delta)?;
        let (allocation, trace) = greedy_solve(&instance, &theta);
        println!("delta = {delta}: budget {:.4}", trace.budget);
        for step in &trace.steps {
            println!(
                "  robot {} -> target {}  score {:8.3}  cost {:.4}  total {:.4}",
                step.pair.0, step.pair.1, step.score, step.cost, step.cumulative_cost
            );
        }
        println!(
            "  {} pairs, stopped: {:?}",
            allocation.len(),
            trace.terminated_by
        );
    }
    Ok(())
}
