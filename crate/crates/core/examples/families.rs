//! Build the standard families, check transitivity witnesses and compare
//! the spectral radius with the degree.
//!
//!     cargo run --example families

use percolab::graph::{gen_complete, gen_cycle, gen_hypercube, gen_torus, parse_graph, spectral_radius, DEFAULT_TOL};

fn main() -> percolab::Result<()> {
    let graphs = vec![
        gen_complete(6)?,
        gen_cycle(9)?,
        gen_hypercube(5)?,
        gen_torus(&[6, 4])?,
        parse_graph("product(cycle(5),complete(3))")?,
        parse_graph("molecular(complete(8),3)")?,
    ];
    println!("{:<34} {:>5} {:>5} {:>4} {:>9}", "family", "|V|", "|E|", "deg", "lambda");
    for g in &graphs {
        let lambda = spectral_radius(g, DEFAULT_TOL)?;
        println!("{:<34} {:>5} {:>5} {:>4} {:>9.5}", g.family(), g.num_vertices(), g.num_edges(), g.degree(), lambda);
    }
    // regular graphs have lambda equal to the degree; the product adds degrees
    let q5 = &graphs[2];
    println!("Q_5 id {} with {} automorphism generators", &q5.id()[..12], q5.automorphisms().len());
    Ok(())
}
