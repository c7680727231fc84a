use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{ThresholdEstimate, ThresholdMethod};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::UnionFind;
use crate::rng::UniformStream;
use crate::stats::Frequency;

/// Upper limit on the replica count reached by doubling.
pub const MAX_REPS_FACTOR: u64 = 16;

/// Smallest volume `k` with `k / |V| >= delta`.
fn target_volume(n: usize, delta: f64) -> usize {
    (1..=n).find(|&k| k as f64 / n as f64 >= delta).unwrap_or(n)
}

fn check_delta(g: &Graph, delta: f64) -> Result<()> {
    let floor = 1.0 / g.num_vertices() as f64;
    if delta.is_nan() || delta > 1.0 {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (1/|V|, 1]")));
    }
    if delta <= floor {
        return Err(Error::DegenerateThreshold { delta, floor });
    }
    Ok(())
}

/// For replica `r`, the smallest `p*` such that `‖K_1‖ >= delta` holds in
/// `sample_replica(g, p, seed, r)` for every `p > p*` and fails for every
/// `p <= p*`. Edges are added in increasing order of their uniforms until
/// the largest cluster reaches the target volume.
pub fn critical_point(g: &Graph, delta: f64, seed: u64, replica: u64) -> Result<f64> {
    check_delta(g, delta)?;
    Ok(critical_point_unchecked(g, target_volume(g.num_vertices(), delta), seed, replica))
}

fn critical_point_unchecked(g: &Graph, target: usize, seed: u64, replica: u64) -> f64 {
    let n = g.num_vertices();
    // Most edges sit far above the crossing; start with those below a
    // generous cut and widen it if the cluster does not form.
    let mut cut = (8.0 / g.degree() as f64).min(1.0);
    loop {
        let mut stream = UniformStream::new(seed, replica);
        let mut low: Vec<(f64, usize)> = (0..g.num_edges())
            .filter_map(|e| {
                let u = stream.next_uniform();
                (u < cut).then_some((u, e))
            })
            .collect();
        low.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut uf = UnionFind::new(n);
        let mut largest = 1;
        for (u, e) in low {
            let (a, b) = g.edge(e);
            if let Some(r) = uf.union(a, b) {
                largest = largest.max(uf.set_size(r));
                if largest >= target {
                    return u;
                }
            }
        }
        if cut >= 1.0 {
            unreachable!("the graph is connected, so all edges open reach every target");
        }
        cut = (cut * 4.0).min(1.0);
    }
}

/// Critical points of replicas `from..to`, in replica order.
fn critical_points_range(g: &Graph, target: usize, seed: u64, from: u64, to: u64) -> Vec<f64> {
    (from..to).into_par_iter().map(|r| critical_point_unchecked(g, target, seed, r)).collect()
}

pub fn critical_points(g: &Graph, delta: f64, reps: u64, seed: u64) -> Result<Vec<f64>> {
    check_delta(g, delta)?;
    Ok(critical_points_range(g, target_volume(g.num_vertices(), delta), seed, 0, reps))
}

/// `P_p(‖K_1‖ >= delta)` estimated from critical points: the fraction of
/// replicas whose critical point lies strictly below `p`. This equals the
/// frequency obtained by sampling each replica at `p` directly.
pub fn crossing_frequency(points: &[f64], p: f64) -> Frequency {
    Frequency::new(points.iter().filter(|&&x| x < p).count() as u64, points.len() as u64)
}

/// Solves `P_p(‖K_1‖ >= delta) = 1/2` by bisection on `[0, 1]`.
///
/// Each midpoint is classified by the Wilson interval of the estimated
/// probability. When the interval contains 1/2 the replica count doubles
/// (up to `MAX_REPS_FACTOR * reps`); if it still does, bisection stops and
/// the current bracket is reported. The interval of the result is the
/// final bracket, so it covers both the bisection width and the sampling
/// error.
pub fn empirical_threshold(g: &Graph, delta: f64, reps: u64, tol: f64, seed: u64) -> Result<ThresholdEstimate> {
    check_delta(g, delta)?;
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let target = target_volume(g.num_vertices(), delta);
    let mut points = critical_points_range(g, target, seed, 0, reps);
    let cap = reps.saturating_mul(MAX_REPS_FACTOR);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut f_lo, mut f_hi) = (0.0, 1.0);
    let mut stalled = false;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let mut f = crossing_frequency(&points, mid);
        while f.ci_low <= 0.5 && f.ci_high >= 0.5 && (points.len() as u64) < cap {
            let have = points.len() as u64;
            let more = critical_points_range(g, target, seed, have, (2 * have).min(cap));
            points.extend(more);
            f = crossing_frequency(&points, mid);
            f_lo = crossing_frequency(&points, lo).value;
            f_hi = crossing_frequency(&points, hi).value;
        }
        if f.value < f_lo || f.value > f_hi {
            return Err(Error::NonMonotone { p: mid });
        }
        if f.ci_low > 0.5 {
            hi = mid;
            f_hi = f.value;
        } else if f.ci_high < 0.5 {
            lo = mid;
            f_lo = f.value;
        } else {
            stalled = true;
            break;
        }
    }
    Ok(ThresholdEstimate {
        value: 0.5 * (lo + hi),
        ci_low: lo,
        ci_high: hi,
        method: ThresholdMethod::Bisection,
        delta: Some(delta),
        reps: points.len() as u64,
        seed,
        widened: stalled,
    })
}

/// Parameters at which `P_p(‖K_1‖ >= delta)` crosses two levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ThresholdWindow {
    pub delta: f64,
    pub reps: u64,
    pub seed: u64,
    pub low_level: f64,
    pub high_level: f64,
    /// Where the probability reaches `low_level`.
    pub p_low: f64,
    /// Where the probability reaches 1/2.
    pub p_mid: f64,
    /// Where the probability reaches `high_level`.
    pub p_high: f64,
    /// `(p_high - p_low) / p_mid`.
    pub relative_width: f64,
}

/// Empirical quantile of sorted data (lower value at ties).
fn quantile(sorted: &[f64], level: f64) -> f64 {
    let idx = ((level * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// The window over which `P_p(‖K_1‖ >= delta)` rises from `low_level` to
/// `high_level`, read off the empirical law of the critical points.
pub fn threshold_window(g: &Graph, delta: f64, reps: u64, seed: u64, low_level: f64, high_level: f64) -> Result<ThresholdWindow> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if !(0.0 < low_level && low_level < high_level && high_level < 1.0) {
        return Err(Error::InvalidParameter("levels must satisfy 0 < low < high < 1".into()));
    }
    let mut points = critical_points(g, delta, reps, seed)?;
    points.sort_unstable_by(f64::total_cmp);
    let (p_low, p_mid, p_high) = (quantile(&points, low_level), quantile(&points, 0.5), quantile(&points, high_level));
    Ok(ThresholdWindow {
        delta,
        reps,
        seed,
        low_level,
        high_level,
        p_low,
        p_mid,
        p_high,
        relative_width: (p_high - p_low) / p_mid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::er_fixed_point;
    use crate::graph::{gen_complete, gen_hypercube, gen_torus};
    use crate::percolation::{clusters, estimate, sample_replica};
    use proptest::prelude::*;

    #[test]
    fn degenerate_delta() {
        let g = gen_complete(10).unwrap();
        assert!(matches!(empirical_threshold(&g, 0.1, 10, 0.01, 1), Err(Error::DegenerateThreshold { .. })));
        assert!(matches!(empirical_threshold(&g, 0.05, 10, 0.01, 1), Err(Error::DegenerateThreshold { .. })));
        assert!(empirical_threshold(&g, 1.5, 10, 0.01, 1).is_err());
    }

    #[test]
    fn critical_point_brackets_the_event() {
        for g in [gen_complete(30).unwrap(), gen_torus(&[6, 6]).unwrap(), gen_hypercube(5).unwrap()] {
            for r in 0..20 {
                let delta = 0.3;
                let x = critical_point(&g, delta, 9, r).unwrap();
                let below = clusters(&g, &sample_replica(&g, x, 9, r)).unwrap().density_k1;
                let above = clusters(&g, &sample_replica(&g, x.next_up(), 9, r)).unwrap().density_k1;
                assert!(below < delta && above >= delta, "{} replica {r}", g.family());
            }
        }
    }

    #[test]
    fn frequency_equals_direct_sampling() {
        let g = gen_complete(40).unwrap();
        let points = critical_points(&g, 0.25, 300, 4).unwrap();
        for p in [0.01, 0.03, 0.05, 0.08] {
            let direct = estimate(&g, p, 300, 4).unwrap().prob_k1_geq(0.25);
            assert_eq!(crossing_frequency(&points, p), direct);
        }
    }

    #[test]
    fn dense_graph_matches_the_giant_equation() {
        // theta(c) = 0.05 at c = -ln(0.95) / 0.05
        let c = -(0.95f64).ln() / 0.05;
        assert!((er_fixed_point(c, 1e-12) - 0.05).abs() < 1e-6);
        let g = gen_complete(200).unwrap();
        let est = empirical_threshold(&g, 0.05, 400, 1e-4, 7).unwrap();
        assert!(est.ci_low <= est.value && est.value <= est.ci_high);
        // finite-n values sit below c/n; see the acceptance notes
        assert!(est.value > 0.4 * c / 199.0 && est.value < 1.2 * c / 199.0, "{est:?}");
    }

    #[test]
    fn connectivity_threshold_of_k20() {
        let g = gen_complete(20).unwrap();
        let est = empirical_threshold(&g, 1.0, 400, 1e-3, 3).unwrap();
        // cross-check: direct frequency of connectivity at the bracket ends
        let at = |p: f64| estimate(&g, p, 2000, 99).unwrap().prob_k1_geq(1.0).value;
        assert!(at(est.ci_low - 0.02) < 0.5 && at(est.ci_high + 0.02) > 0.5, "{est:?}");
        assert!((est.value - (20f64).ln() / 20.0).abs() < 0.05);
    }

    #[test]
    fn window_is_ordered() {
        let g = gen_complete(100).unwrap();
        let w = threshold_window(&g, 0.1, 200, 5, 0.1, 0.9).unwrap();
        assert!(w.p_low <= w.p_mid && w.p_mid <= w.p_high && w.relative_width >= 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn crossing_frequency_is_monotone(seed: u64, a in 0.0f64..0.2, b in 0.0f64..0.2) {
            let g = gen_complete(25).unwrap();
            let points = critical_points(&g, 0.2, 50, seed).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(crossing_frequency(&points, lo).successes <= crossing_frequency(&points, hi).successes);
        }
    }
}
