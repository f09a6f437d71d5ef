//! Box branch-and-bound for one fixed pick order, against its a-priori gap
//! bound and a dense scan.
//!
//! `cargo run -p irmrta --release --example ordered_bounds`

use irmrta::scenario::{generate_scenario, ScenarioConfig};
use irmrta::{
    dense_scan_ordered, greedy_solve, ordered_gap_bound, solve_ordered, GridSpec, ObjectiveWeights,
    ParamBounds, RiskParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = generate_scenario(&ScenarioConfig::new(5, 5, 3))?;
    let instance = &scenario.instance;
    let bounds = ParamBounds::default();
    let weights = ObjectiveWeights::default();
    let nominal = RiskParams::new(1.0, 1.0, 0.8)?;

    // Pick order produced under parameters away from the nominal.
    let (ordering, _) = greedy_solve(instance, &RiskParams::new(0.6, 0.5, 0.55)?);
    println!("ordering {:?}", ordering.pairs());

    for depth in [2, 4, 6, 8, 10] {
        let sol = solve_ordered(instance, &ordering, &nominal, &weights, &bounds, depth)?;
        let gap = ordered_gap_bound(depth, &nominal, &bounds, &weights)?;
        println!(
            "depth {depth:>2}: objective {:.5}  gap bound {:.5}  boxes {}",
            sol.objective, gap, sol.boxes_evaluated
        );
    }

    let scan = dense_scan_ordered(
        instance,
        &ordering,
        &nominal,
        &weights,
        &bounds,
        &GridSpec::cubic(120)?,
    )
    .expect("ordering is realizable");
    println!(
        "dense scan: {:.5} (cell slack {:.5})",
        scan.objective, scan.slack
    );
    Ok(())
}
