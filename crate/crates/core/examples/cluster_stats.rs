//! Sample one configuration, inspect its clusters, then estimate cluster
//! densities over many replicas.
//!
//!     cargo run --release --example cluster_stats

use percolab::graph::gen_hypercube;
use percolab::percolation::{clusters, estimate, sample};

fn main() -> percolab::Result<()> {
    let g = gen_hypercube(10)?;
    let c = sample(&g, 0.15, 42);
    let report = clusters(&g, &c)?;
    println!("{} open edges of {}", c.num_open(), g.num_edges());
    println!("largest clusters: {:?}", &report.cluster_sizes[..5.min(report.cluster_sizes.len())]);
    println!("|K1|/n = {:.4}  |K2|/n = {:.4}  |K_o|/n = {:.4}", report.density_k1, report.density_k2, report.density_o);

    for p in [0.08, 0.11, 0.15] {
        let summary = estimate(&g, p, 500, 7)?;
        let k1 = summary.mean_k1();
        let big = summary.prob_k1_geq(0.1);
        println!(
            "p = {p:.2}: E|K1|/n = {:.4} +- {:.4}, P(|K1| >= 0.1 n) = {:.3} [{:.3}, {:.3}]",
            k1.mean, k1.stderr, big.value, big.ci_low, big.ci_high
        );
    }
    Ok(())
}
