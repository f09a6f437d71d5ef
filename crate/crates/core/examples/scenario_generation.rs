//! Random capture scenarios: disc sizes set intact odds, distance and
//! expected repair set rewards.
//!
//! `cargo run -p irmrta --example scenario_generation`

use irmrta::scenario::{capture_reward, damage_free_prob, generate_scenario, ScenarioConfig};

fn main() -> irmrta::Result<()> {
    println!("even sizes: p = {}", damage_free_prob(1.0, 1.0, 5.0));
    println!(
        "reward example: {}",
        capture_reward(10.0, 1.0, 2.0, 0.5, 0.8, 4.0)
    );

    let config = ScenarioConfig::new(4, 3, 9);
    let s = generate_scenario(&config)?;
    println!("\nrobots (x, y, size):");
    for (pos, size) in s
        .geometry
        .robot_positions
        .iter()
        .zip(&s.geometry.robot_sizes)
    {
        println!("  ({:.3}, {:.3})  {size:.3}", pos[0], pos[1]);
    }
    println!("targets (x, y, size):");
    for (pos, size) in s
        .geometry
        .target_positions
        .iter()
        .zip(&s.geometry.target_sizes)
    {
        println!("  ({:.3}, {:.3})  {size:.3}", pos[0], pos[1]);
    }
    println!("reward shift {:.3}", s.reward_shift);
    for i in 0..s.instance.n_robots() {
        let row: Vec<String> = (0..s.instance.n_targets())
            .map(|j| {
                format!(
                    "{:7.2}@{:.2}",
                    s.instance.reward(i, j),
                    s.instance.prob(i, j)
                )
            })
            .collect();
        println!("  {}", row.join("  "));
    }
    Ok(())
}
