//! Compare the density of the giant at p(1 + epsilon) with the mean-field
//! lower bound obtained from its density at p.
//!
//!     cargo run --release --example mean_field

use percolab::estimators::mean_field_check;
use percolab::graph::{gen_complete, gen_hypercube};

fn main() -> percolab::Result<()> {
    let k = gen_complete(400)?;
    let q = gen_hypercube(11)?;
    let cases = [(&k, 1.2 / 399.0, 0.5), (&k, 1.5 / 399.0, 1.0), (&q, 0.12, 0.5)];
    for (g, p, eps) in cases {
        let r = mean_field_check(g, p, eps, 300, 5, 0.05)?;
        println!(
            "{:<16} p = {p:.5} eps = {eps}: theta(p) = {:.4}, theta(p(1+eps)) = {:.4} vs bound {:.4} -> {}",
            g.family(),
            r.baseline.mean,
            r.lhs.mean,
            r.rhs,
            if r.pass { "ok" } else { "below" }
        );
    }
    Ok(())
}
