//! Exact answers by enumerating all edge configurations of a small graph,
//! in floating point and in rational arithmetic.
//!
//!     cargo run --example exact_oracle

use num_rational::BigRational;
use percolab::exact::{connected_probability_rational, exact_tau_fail_prob, exact_theta_rational, Census};
use percolab::graph::{gen_complete, gen_cycle};

fn main() -> percolab::Result<()> {
    let half = BigRational::new(1.into(), 2.into());
    let k4 = gen_complete(4)?;
    println!("K_4 at p = 1/2: P(connected) = {}", connected_probability_rational(&k4, &half)?);
    println!("K_3 at p = 1/2: theta = {}", exact_theta_rational(&gen_complete(3)?, &half)?);

    let census = Census::new(&gen_complete(5)?, 0)?;
    println!("\nK_5, root 0");
    println!("{:>5} {:>6} {:>8} {:>8} {:>10} {:>10}", "p", "alpha", "theta", "h", "q", "P(fail)");
    for (p, alpha) in [(0.3, 0.5), (0.5, 0.5), (0.7, 0.5), (0.5, 0.9)] {
        let c = census.coupling_constants(p, alpha);
        let q = c.q.map_or("-".to_string(), |q| format!("{q:.4}"));
        let fail = if c.applicable { format!("{:.3e}", exact_tau_fail_prob(&gen_complete(5)?, p, alpha, 0)?) } else { "n/a".into() };
        println!("{p:>5} {alpha:>6} {:>8.4} {:>8.4} {q:>10} {fail:>10}", c.theta, c.h);
    }

    // any event of the cluster volumes can be weighed directly
    let c6 = Census::new(&gen_cycle(6)?, 0)?;
    let p_two_big = c6.probability(0.5, |_k1, k2, _ko| k2 >= 2.0 / 6.0);
    println!("\nC_6 at p = 1/2: P(|K2| >= 2) = {p_two_big:.6}");
    Ok(())
}
