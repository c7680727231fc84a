//! Sweep p across the transition on a complete graph and print a CSV of the
//! giant and second cluster densities next to the Erdos-Renyi prediction.
//!
//!     cargo run --release --example phase_sweep > sweep.csv

use percolab::estimators::{er_fixed_point, sweep};
use percolab::graph::gen_complete;

fn main() -> percolab::Result<()> {
    let n = 500;
    let g = gen_complete(n)?;
    let grid: Vec<f64> = (1..=12).map(|i| i as f64 * 0.25 / (n - 1) as f64).collect();
    let result = sweep(&g, &grid, 0.1, 0.05, 300, 3)?;
    println!("c,p,mean_k1,er_prediction,mean_k2,prob_k1_geq_alpha");
    for row in &result.grid {
        let c = row.p * (n - 1) as f64;
        println!(
            "{c:.2},{:.6},{:.5},{:.5},{:.5},{:.4}",
            row.p,
            row.mean_k1.mean,
            er_fixed_point(c, 1e-12),
            row.mean_k2.mean,
            row.prob_k1_geq_alpha.value
        );
    }
    Ok(())
}
