//! Molecular graphs: atoms joined by a sparse bridge set. Verify the
//! witness, then contrast the second cluster with a complete graph.
//!
//!     cargo run --release --example molecular_uniqueness

use percolab::estimators::uniqueness_profile;
use percolab::graph::{gen_complete, gen_molecular, verify_molecular_witness};

fn main() -> percolab::Result<()> {
    let atom = gen_complete(100)?;
    let g = gen_molecular(&atom, 2)?;
    let w = g.witness().expect("molecular graphs carry a witness");
    let report = verify_molecular_witness(&g, w)?;
    println!(
        "{}: {} bridges, {} components once removed, |F|/|V| = {}, satisfied = {}",
        g.family(),
        w.bridges.len(),
        report.components,
        report.density_ratio,
        report.satisfied(w.atom_count())
    );

    let flat = gen_complete(200)?;
    let p = 2.0 / 99.0;
    for (name, graph) in [("molecular", &g), ("complete", &flat)] {
        let u = uniqueness_profile(graph, p, 0.2, 500, 9)?;
        println!(
            "{name:<9} p = {p:.4}: P(|K2| >= 0.2 n) = {:.3} [{:.3}, {:.3}], E|K1|/n = {:.3}, E|K2|/n = {:.3}",
            u.prob_k2_geq_beta.value, u.prob_k2_geq_beta.ci_low, u.prob_k2_geq_beta.ci_high, u.mean_k1.mean, u.mean_k2.mean
        );
    }
    Ok(())
}
