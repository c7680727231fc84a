//! Threshold estimates for p_c(delta): bisection on crossing frequencies,
//! the 10-90% window, and the bounds 1/lambda and 1/(deg - 1).
//!
//!     cargo run --release --example thresholds

use percolab::estimators::{degree_bounds, empirical_threshold, spectral_threshold, threshold_window};
use percolab::graph::{gen_complete, gen_hypercube, gen_torus};

fn main() -> percolab::Result<()> {
    let delta = 0.05;
    for g in [gen_complete(300)?, gen_hypercube(10)?, gen_torus(&[30, 30])?] {
        let est = empirical_threshold(&g, delta, 400, 1e-4, 11)?;
        let window = threshold_window(&g, delta, 1000, 12, 0.1, 0.9)?;
        let spectral = spectral_threshold(&g);
        let bounds = degree_bounds(&g)?;
        println!("{}", g.family());
        println!("  p_c(delta) = {:.5} [{:.5}, {:.5}]{}", est.value, est.ci_low, est.ci_high, if est.widened { " (bracket)" } else { "" });
        println!("  10-90% window [{:.5}, {:.5}], relative width {:.3}", window.p_low, window.p_high, window.relative_width);
        println!("  1/lambda = {:.5}, degree bounds [{:.5}, {:.5}]", spectral.value, bounds.lower, bounds.upper);
    }
    Ok(())
}
