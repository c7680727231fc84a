//! Couple the conditioned measure with an independent one, first with the
//! constants from the exact oracle and then with a hand-picked q that lets
//! the coupling fail often enough to see it.
//!
//!     cargo run --release --example coupling

use percolab::coupling::CouplingLab;
use percolab::graph::{gen_complete, gen_hypercube};

fn main() -> percolab::Result<()> {
    let k5 = gen_complete(5)?;
    let lab = CouplingLab::prepare(&k5, 0.5, 0.5, 0)?;
    let c = lab.constants();
    println!("K_5, p = 0.5, alpha = 0.5: theta = {:.4}, h = {:.4}, q = {:.4}", c.theta, c.h, lab.q());
    let report = lab.domination_report(20_000, 1)?;
    println!("failure frequency {:.5} (exact {:.5}, bound sqrt(h) = {:.4})", report.freq_a, report.exact_tau_fail_prob, report.h_sqrt);

    let q3 = gen_hypercube(3)?;
    let lab = CouplingLab::with_threshold(&q3, 0.6, 0.5, 0, 0.2)?;
    let exact = lab.exact_failure_probability()?;
    let report = lab.domination_report(20_000, 2)?;
    println!("\nQ_3, p = 0.6, alpha = 0.5, q = 0.2");
    println!("failure frequency {:.4} [{:.4}, {:.4}], exact {exact:.4}", report.freq_a, report.freq_a_interval.ci_low, report.freq_a_interval.ci_high);
    println!("monotone in {} of {} runs", report.monotone_runs, report.n_runs);

    let run = lab.run(2, 0)?;
    println!("\none run: tau_fail = {}, tau_moat = {}", run.trace.tau_fail, run.trace.tau_moat);
    for step in run.trace.steps().take(6) {
        println!("  step {:>2}: edge {:>2} {}", step.step, step.edge, if step.state { "open" } else { "closed" });
    }
    Ok(())
}
