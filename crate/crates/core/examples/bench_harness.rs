//! A small benchmark sweep written as CSV to stdout, then the median
//! normalized objective per depth.
//!
//! `cargo run -p irmrta --release --example bench_harness`

use irmrta::bench::{median_normalized, run_bench, write_csv, BenchConfig};
use irmrta::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = BenchConfig {
        sizes: vec![4, 6],
        depths: vec![2, 4, 6, 8],
        trials: 5,
        seed: 17,
        oracle: Some(GridSpec::cubic(30)?),
        ..BenchConfig::default()
    };
    let records = run_bench(&config)?;
    write_csv(&records, std::io::stdout().lock())?;
    for &d in &config.depths {
        if let Some(m) = median_normalized(&records, d) {
            eprintln!("depth {d}: median normalized objective {m:.4}");
        }
    }
    Ok(())
}
