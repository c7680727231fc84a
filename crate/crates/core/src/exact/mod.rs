//! Exhaustive enumeration over all `2^|E|` configurations of a small graph.
//!
//! The weight of a configuration depends only on its number of open edges,
//! so every event probability is a polynomial `sum_k N_k p^k (1-p)^(|E|-k)`
//! with integer counts `N_k`. A [`Census`] stores those counts jointly for
//! the volumes of `K_1`, `K_2` and `K_o`; it is built once per graph and
//! then answers any `(p, alpha)` query in floating point or, for rational
//! `p`, exactly.

mod tree;

use std::env;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::clamp_probability;
use crate::stats::KahanSum;

pub use tree::{exact_tau_fail_prob, ExplorationTree, NodeId};

pub const DEFAULT_CAP: usize = 22;
/// Largest edge count for which rational weights are materialised.
pub const RATIONAL_CAP: usize = 16;
pub const CAP_ENV: &str = "PERCOLAB_EXACT_CAP";

/// The enumeration cap, overridable through `PERCOLAB_EXACT_CAP`.
pub fn exact_cap() -> usize {
    env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

pub(crate) fn check_cap(g: &Graph, cap: usize) -> Result<()> {
    // masks are u64 and vertex sets are u64 bitmaps
    let cap = cap.min(63);
    if g.num_edges() > cap || g.num_vertices() > 64 {
        return Err(Error::CapacityExceeded { edges: g.num_edges(), cap });
    }
    Ok(())
}

/// `p^k (1-p)^(m-k)` for `k = 0..=m`.
fn weight_table(p: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect()
}

fn rational_weight_table(p: &BigRational, m: usize) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    (0..=m).map(|k| p.pow(k as i32) * q.pow((m - k) as i32)).collect()
}

/// Bitmap helpers shared with the exploration tree.
pub(crate) struct EdgeMasks {
    pub ends: Vec<u64>,
    pub n: usize,
}

impl EdgeMasks {
    pub fn new(g: &Graph) -> EdgeMasks {
        EdgeMasks { ends: g.edges().iter().map(|&(u, v)| 1u64 << u | 1u64 << v).collect(), n: g.num_vertices() }
    }

    /// Vertex set of the cluster of `o` among the edges in `open`.
    pub fn cluster_of(&self, open: u64, o: usize) -> u64 {
        let mut reached = 1u64 << o;
        loop {
            let before = reached;
            let mut bits = open;
            while bits != 0 {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if self.ends[e] & reached != 0 {
                    reached |= self.ends[e];
                }
            }
            if reached == before {
                return reached;
            }
        }
    }

    /// `(|K_1|, |K_2|, |K_o|)` of the configuration `open`.
    pub fn volumes(&self, open: u64, o: usize) -> (usize, usize, usize) {
        let mut unseen = (1u64 << self.n) - 1;
        if self.n == 64 {
            unseen = u64::MAX;
        }
        let (mut k1, mut k2, mut ko) = (0, 0, 0);
        while unseen != 0 {
            let v = unseen.trailing_zeros() as usize;
            let c = self.cluster_of(open, v);
            unseen &= !c;
            let s = c.count_ones() as usize;
            if c >> o & 1 == 1 {
                ko = s;
            }
            if s > k1 {
                k2 = k1;
                k1 = s;
            } else if s > k2 {
                k2 = s;
            }
        }
        (k1, k2, ko)
    }
}

/// Joint counts of `(#open, |K_1|, |K_2|, |K_o|)` over all configurations.
#[derive(Debug, Clone)]
pub struct Census {
    graph_id: String,
    num_vertices: usize,
    num_edges: usize,
    root: usize,
    counts: Vec<u64>,
}

impl Census {
    pub fn new(g: &Graph, root: usize) -> Result<Census> {
        Census::with_cap(g, root, exact_cap())
    }

    pub fn with_cap(g: &Graph, root: usize, cap: usize) -> Result<Census> {
        check_cap(g, cap)?;
        if root >= g.num_vertices() {
            return Err(Error::InvalidIndex(format!("vertex {root} out of range")));
        }
        let (n, m) = (g.num_vertices(), g.num_edges());
        let masks = EdgeMasks::new(g);
        let side = n + 1;
        let len = (m + 1) * side * side * side;
        const CHUNK: u64 = 1 << 12;
        let total = 1u64 << m;
        let chunks = total.div_ceil(CHUNK);
        // Integer counts: the reduction is exact, so the result does not
        // depend on how rayon splits the work.
        let counts = (0..chunks)
            .into_par_iter()
            .fold(
                || vec![0u64; len],
                |mut acc, chunk| {
                    for mask in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                        let (k1, k2, ko) = masks.volumes(mask, root);
                        let k = mask.count_ones() as usize;
                        acc[((k * side + k1) * side + k2) * side + ko] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; len],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(Census { graph_id: g.id().to_owned(), num_vertices: n, num_edges: m, root, counts })
    }

    pub fn graph_id(&self) -> &str {
        &self.graph_id
    }

    pub fn root(&self) -> usize {
        self.root
    }

    fn entries(&self) -> impl Iterator<Item = (usize, [usize; 3], u64)> + '_ {
        let side = self.num_vertices + 1;
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(i, &c)| {
            let ko = i % side;
            let k2 = i / side % side;
            let k1 = i / (side * side) % side;
            let k = i / (side * side * side);
            (k, [k1, k2, ko], c)
        })
    }

    fn density(&self, volume: usize) -> f64 {
        volume as f64 / self.num_vertices as f64
    }

    /// Number of configurations with the given volumes `(|K_1|, |K_2|, |K_o|)`.
    pub fn count(&self, event: impl Fn(usize, usize, usize) -> bool) -> u64 {
        self.entries().filter(|(_, [k1, k2, ko], _)| event(*k1, *k2, *ko)).map(|(_, _, c)| c).sum()
    }

    /// `E_p f(‖K_1‖, ‖K_2‖, ‖K_o‖)`.
    pub fn expect(&self, p: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let w = weight_table(clamp_probability(p), self.num_edges);
        self.entries()
            .map(|(k, [k1, k2, ko], c)| c as f64 * w[k] * f(self.density(k1), self.density(k2), self.density(ko)))
            .collect::<KahanSum>()
            .total()
    }

    /// `P_p` of an event on the densities `(‖K_1‖, ‖K_2‖, ‖K_o‖)`.
    pub fn probability(&self, p: f64, event: impl Fn(f64, f64, f64) -> bool) -> f64 {
        self.expect(p, |a, b, c| if event(a, b, c) { 1.0 } else { 0.0 })
    }

    /// Exact `E_p f` for rational `p`, where `f` maps volumes to rationals.
    pub fn expect_rational(&self, p: &BigRational, f: impl Fn(usize, usize, usize) -> BigRational) -> Result<BigRational> {
        if self.num_edges > RATIONAL_CAP {
            return Err(Error::CapacityExceeded { edges: self.num_edges, cap: RATIONAL_CAP });
        }
        if p < &BigRational::zero() || p > &BigRational::one() {
            return Err(Error::InvalidParameter("rational mode needs p in [0, 1]".into()));
        }
        let w = rational_weight_table(p, self.num_edges);
        let mut total = BigRational::zero();
        for (k, [k1, k2, ko], c) in self.entries() {
            total += BigRational::from_integer(BigInt::from(c)) * &w[k] * f(k1, k2, ko);
        }
        Ok(total)
    }

    pub fn probability_rational(&self, p: &BigRational, event: impl Fn(usize, usize, usize) -> bool) -> Result<BigRational> {
        self.expect_rational(p, |a, b, c| if event(a, b, c) { BigRational::one() } else { BigRational::zero() })
    }

    pub fn theta(&self, p: f64) -> f64 {
        self.expect(p, |k1, _, _| k1)
    }

    pub fn h(&self, p: f64, alpha: f64) -> f64 {
        self.probability(p, |k1, k2, _| k1 < alpha || k2 >= alpha / 2.0)
    }

    pub fn connected_probability(&self, p: f64) -> f64 {
        self.probability(p, |k1, _, _| k1 >= 1.0)
    }

    /// `P_p(‖K_o‖ < alpha)`, the mass of the conditioning event.
    pub fn small_root_probability(&self, p: f64, alpha: f64) -> f64 {
        self.probability(p, |_, _, ko| ko < alpha)
    }

    pub fn coupling_constants(&self, p: f64, alpha: f64) -> CouplingConstants {
        CouplingConstants::new(p, alpha, self.theta(p), self.h(p, alpha))
    }
}

/// The constants of the approximate domination statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CouplingConstants {
    pub p: f64,
    pub alpha: f64,
    /// `E_p ‖K_1‖`.
    pub theta: f64,
    /// `P_p(‖K_1‖ < alpha or ‖K_2‖ >= alpha/2)`.
    pub h: f64,
    /// `2 sqrt(h) / (1 - theta - h)`, defined when applicable.
    pub delta: Option<f64>,
    /// `(1 - theta - delta) p`, defined when applicable.
    pub q: Option<f64>,
    /// `theta + h < 1`.
    pub applicable: bool,
}

impl CouplingConstants {
    pub fn new(p: f64, alpha: f64, theta: f64, h: f64) -> CouplingConstants {
        let applicable = theta + h < 1.0;
        let (delta, q) = if applicable {
            let delta = 2.0 * h.sqrt() / (1.0 - theta - h);
            (Some(delta), Some((1.0 - theta - delta) * p))
        } else {
            (None, None)
        };
        CouplingConstants { p, alpha, theta, h, delta, q, applicable }
    }

    pub fn h_sqrt(&self) -> f64 {
        self.h.sqrt()
    }

    /// `q`, or the not-applicable error.
    pub fn require_q(&self) -> Result<f64> {
        self.q.ok_or(Error::NotApplicable { sum: self.theta + self.h })
    }
}

pub fn exact_theta(g: &Graph, p: f64) -> Result<f64> {
    Ok(Census::new(g, 0)?.theta(p))
}

pub fn exact_h(g: &Graph, p: f64, alpha: f64) -> Result<f64> {
    Ok(Census::new(g, 0)?.h(p, alpha))
}

pub fn coupling_constants(g: &Graph, p: f64, alpha: f64) -> Result<CouplingConstants> {
    Ok(Census::new(g, 0)?.coupling_constants(p, alpha))
}

/// Exact `E_p ‖K_1‖` for rational `p`.
pub fn exact_theta_rational(g: &Graph, p: &BigRational) -> Result<BigRational> {
    let n = BigInt::from(g.num_vertices());
    Census::new(g, 0)?.expect_rational(p, |k1, _, _| BigRational::new(BigInt::from(k1), n.clone()))
}

/// Exact probability that the open subgraph is connected, for rational `p`.
pub fn connected_probability_rational(g: &Graph, p: &BigRational) -> Result<BigRational> {
    let n = g.num_vertices();
    Census::new(g, 0)?.probability_rational(p, |k1, _, _| k1 == n)
}

/// The product measure `P_p` as a table indexed by configuration mask
/// (bit `e` set iff edge `e` is open).
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub graph_id: String,
    pub p: f64,
    pub num_edges: usize,
    pub weights: Vec<f64>,
}

impl ExactDistribution {
    pub fn total(&self) -> f64 {
        self.weights.iter().copied().collect::<KahanSum>().total()
    }

    pub fn weight(&self, mask: u64) -> f64 {
        self.weights[mask as usize]
    }

    pub fn probability(&self, event: impl Fn(u64) -> bool) -> f64 {
        self.weights.iter().enumerate().filter(|&(mask, _)| event(mask as u64)).map(|(_, &w)| w).collect::<KahanSum>().total()
    }
}

pub fn exact_distribution(g: &Graph, p: f64) -> Result<ExactDistribution> {
    exact_distribution_with_cap(g, p, exact_cap())
}

pub fn exact_distribution_with_cap(g: &Graph, p: f64, cap: usize) -> Result<ExactDistribution> {
    check_cap(g, cap)?;
    let p = clamp_probability(p);
    let m = g.num_edges();
    let table = weight_table(p, m);
    let weights = (0..1u64 << m).into_par_iter().map(|mask| table[mask.count_ones() as usize]).collect();
    Ok(ExactDistribution { graph_id: g.id().to_owned(), p, num_edges: m, weights })
}

/// Exact rational weights, indexed like [`ExactDistribution::weights`].
pub fn exact_distribution_rational(g: &Graph, p: &BigRational) -> Result<Vec<BigRational>> {
    check_cap(g, RATIONAL_CAP.min(exact_cap()))?;
    let table = rational_weight_table(p, g.num_edges());
    Ok((0..1u64 << g.num_edges()).map(|mask| table[mask.count_ones() as usize].clone()).collect())
}

/// `P_p(· | ‖K_o‖ < alpha)` as a mask-indexed table.
pub fn conditioned_distribution(g: &Graph, p: f64, alpha: f64, o: usize) -> Result<Vec<f64>> {
    let dist = exact_distribution(g, p)?;
    let masks = EdgeMasks::new(g);
    let n = g.num_vertices() as f64;
    let mut table: Vec<f64> = dist
        .weights
        .par_iter()
        .enumerate()
        .map(|(mask, &w)| if (masks.cluster_of(mask as u64, o).count_ones() as f64 / n) < alpha { w } else { 0.0 })
        .collect();
    let z = table.iter().copied().collect::<KahanSum>().total();
    if !(z > 0.0) {
        return Err(Error::ConditioningOnNullEvent);
    }
    table.iter_mut().for_each(|w| *w /= z);
    Ok(table)
}

/// `P_p(next_edge open | revealed, ‖K_o‖ < alpha)`, by summing over every
/// completion of the unrevealed edges.
pub fn conditioned_edge_prob(
    g: &Graph,
    p: f64,
    o: usize,
    alpha: f64,
    revealed: &[(usize, bool)],
    next_edge: usize,
) -> Result<f64> {
    check_cap(g, exact_cap())?;
    let m = g.num_edges();
    if o >= g.num_vertices() {
        return Err(Error::InvalidIndex(format!("vertex {o} out of range")));
    }
    if next_edge >= m {
        return Err(Error::InvalidIndex(format!("edge {next_edge} out of range")));
    }
    let (mut known, mut fixed_open) = (0u64, 0u64);
    for &(e, open) in revealed {
        if e >= m {
            return Err(Error::InvalidIndex(format!("edge {e} out of range")));
        }
        if known >> e & 1 == 1 && (fixed_open >> e & 1 == 1) != open {
            return Err(Error::InvalidArgument(format!("edge {e} revealed twice with different states")));
        }
        known |= 1 << e;
        if open {
            fixed_open |= 1 << e;
        }
    }
    let p = clamp_probability(p);
    let free: Vec<usize> = (0..m).filter(|e| known >> e & 1 == 0).collect();
    let table = weight_table(p, free.len());
    let masks = EdgeMasks::new(g);
    let n = g.num_vertices() as f64;

    let (mut num, mut den) = (KahanSum::default(), KahanSum::default());
    for sub in 0..1u64 << free.len() {
        let mut open = fixed_open;
        for (i, &e) in free.iter().enumerate() {
            if sub >> i & 1 == 1 {
                open |= 1 << e;
            }
        }
        if (masks.cluster_of(open, o).count_ones() as f64 / n) >= alpha {
            continue;
        }
        let w = table[sub.count_ones() as usize];
        den.add(w);
        if open >> next_edge & 1 == 1 {
            num.add(w);
        }
    }
    if !(den.total() > 0.0) {
        return Err(Error::ConditioningOnNullEvent);
    }
    Ok(num.total() / den.total())
}

/// Regression snapshot of the oracle quantities for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OracleRecord {
    pub graph: String,
    pub graph_hash: String,
    pub p: f64,
    pub alpha: f64,
    pub theta: f64,
    pub h: f64,
    pub delta: Option<f64>,
    pub q: Option<f64>,
    pub applicable: bool,
    pub tau_fail_prob: Option<f64>,
    pub connected_probability: f64,
}

pub fn oracle_record(g: &Graph, p: f64, alpha: f64, o: usize) -> Result<OracleRecord> {
    let census = Census::new(g, o)?;
    let constants = census.coupling_constants(p, alpha);
    let tau_fail_prob = match constants.q {
        Some(q) => Some(ExplorationTree::build(g, p, alpha, o)?.tau_fail_probability(q)?),
        None => None,
    };
    Ok(OracleRecord {
        graph: g.family().to_owned(),
        graph_hash: g.id().to_owned(),
        p,
        alpha,
        theta: constants.theta,
        h: constants.h,
        delta: constants.delta,
        q: constants.q,
        applicable: constants.applicable,
        tau_fail_prob,
        connected_probability: census.connected_probability(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_hypercube};
    use crate::percolation::{clusters, Configuration};
    use approx::assert_abs_diff_eq;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// Oracle for the census: a direct loop over configurations using the
    /// percolation engine's cluster reports.
    fn brute_force(g: &Graph, p: f64, f: impl Fn(&crate::percolation::ClusterReport) -> f64) -> f64 {
        let m = g.num_edges();
        (0..1u64 << m)
            .map(|mask| {
                let k = mask.count_ones() as i32;
                let w = p.powi(k) * (1.0 - p).powi(m as i32 - k);
                w * f(&clusters(g, &Configuration::from_mask(g, mask)).unwrap())
            })
            .sum()
    }

    #[test]
    fn triangle_values() {
        let k3 = gen_complete(3).unwrap();
        let census = Census::new(&k3, 0).unwrap();
        // P(connected) = p^3 + 3p^2(1-p) = 1/2 at p = 1/2
        assert_eq!(census.probability_rational(&half(), |k1, _, _| k1 == 3).unwrap(), half());
        assert_eq!(exact_theta_rational(&k3, &half()).unwrap(), ratio(19, 24));
        assert_abs_diff_eq!(exact_theta(&k3, 0.5).unwrap(), 19.0 / 24.0, epsilon = 1e-15);
        assert_abs_diff_eq!(exact_h(&k3, 0.5, 0.9).unwrap(), 0.5, epsilon = 1e-15);
        let c = coupling_constants(&k3, 0.5, 0.9).unwrap();
        assert!(!c.applicable);
        assert!(c.q.is_none() && c.require_q().is_err());
    }

    #[test]
    fn k4_connectivity_is_38_over_64() {
        let k4 = gen_complete(4).unwrap();
        assert_eq!(connected_probability_rational(&k4, &half()).unwrap(), ratio(38, 64));
        // 38 connected labelled graphs on 4 vertices
        let dist = exact_distribution(&k4, 0.5).unwrap();
        let masks = EdgeMasks::new(&k4);
        let connected = (0..64u64).filter(|&m| masks.volumes(m, 0).0 == 4).count();
        assert_eq!(connected, 38);
        assert_abs_diff_eq!(dist.probability(|m| masks.volumes(m, 0).0 == 4), 38.0 / 64.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_mass_at_full_parameter() {
        let g = gen_cycle(5).unwrap();
        let dist = exact_distribution(&g, 1.0).unwrap();
        assert_eq!(dist.weight(0b11111), 1.0);
        assert_eq!(dist.total(), 1.0);
        let c = coupling_constants(&g, 1.0, 0.7).unwrap();
        assert_eq!((c.theta, c.h, c.applicable), (1.0, 0.0, false));
    }

    #[test]
    fn weights_sum_to_one() {
        for g in [gen_complete(5).unwrap(), gen_cycle(7).unwrap(), gen_hypercube(3).unwrap()] {
            for p in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
                assert!((exact_distribution(&g, p).unwrap().total() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rational_weights_sum_to_one() {
        let g = gen_complete(4).unwrap();
        let w = exact_distribution_rational(&g, &ratio(1, 3)).unwrap();
        assert_eq!(w.iter().fold(BigRational::zero(), |a, b| a + b), BigRational::one());
    }

    #[test]
    fn census_matches_brute_force() {
        for g in [gen_complete(4).unwrap(), gen_cycle(6).unwrap(), gen_hypercube(3).unwrap()] {
            let census = Census::new(&g, 0).unwrap();
            for p in [0.2, 0.55, 0.9] {
                let theta = brute_force(&g, p, |r| r.density_k1);
                assert_abs_diff_eq!(census.theta(p), theta, epsilon = 1e-12);
                let alpha = 0.5;
                let h = brute_force(&g, p, |r| (r.density_k1 < alpha || r.density_k2 >= alpha / 2.0) as u8 as f64);
                assert_abs_diff_eq!(census.h(p, alpha), h, epsilon = 1e-12);
                let small = brute_force(&g, p, |r| (r.density_o < alpha) as u8 as f64);
                assert_abs_diff_eq!(census.small_root_probability(p, alpha), small, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = gen_complete(8).unwrap(); // 28 edges
        assert!(matches!(Census::new(&g, 0), Err(Error::CapacityExceeded { edges: 28, .. })));
        assert!(matches!(exact_distribution_with_cap(&gen_complete(5).unwrap(), 0.5, 9), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn vacuous_condition_returns_p() {
        let g = gen_cycle(5).unwrap();
        for e in 0..5 {
            assert_abs_diff_eq!(conditioned_edge_prob(&g, 0.37, 0, 1.5, &[], e).unwrap(), 0.37, epsilon = 1e-14);
        }
    }

    #[test]
    fn inconsistent_history_is_a_null_event() {
        let k3 = gen_complete(3).unwrap();
        let revealed = [(0, true), (1, true)];
        assert!(matches!(conditioned_edge_prob(&k3, 0.5, 0, 0.9, &revealed, 2), Err(Error::ConditioningOnNullEvent)));
    }

    #[test]
    fn triangle_conditioned_edge() {
        // Revealed (0,1) open. Completions of (0,2),(1,2) with K_o != V:
        // only both closed survives, so (0,2) is open with probability 0.
        let k3 = gen_complete(3).unwrap();
        let v = conditioned_edge_prob(&k3, 0.5, 0, 0.9, &[(0, true)], 1).unwrap();
        assert_eq!(v, 0.0);
        assert!(v < 0.5);
        // with nothing revealed: P(e open, not connected) / P(not connected)
        // = (3 * 1/8 * 1/3 ... ) enumerated: single-edge configurations only
        let v = conditioned_edge_prob(&k3, 0.5, 0, 0.9, &[], 0).unwrap();
        assert_abs_diff_eq!(v, (1.0 / 8.0) / (4.0 / 8.0), epsilon = 1e-15);
    }

    #[test]
    fn law_of_total_probability() {
        let g = gen_cycle(6).unwrap();
        let (p, alpha, target) = (0.6, 0.7, 4);
        let cond = conditioned_distribution(&g, p, alpha, 0).unwrap();
        let marginal: f64 = (0..64usize).filter(|m| m >> target & 1 == 1).map(|m| cond[m]).sum();
        // histories: all assignments to edges {0, 2, 5}
        let subset = [0usize, 2, 5];
        let mut total = 0.0;
        for bits in 0..8u64 {
            let revealed: Vec<(usize, bool)> = subset.iter().enumerate().map(|(i, &e)| (e, bits >> i & 1 == 1)).collect();
            let weight: f64 = (0..64usize)
                .filter(|&m| revealed.iter().all(|&(e, s)| (m >> e & 1 == 1) == s))
                .map(|m| cond[m])
                .sum();
            if weight > 0.0 {
                total += weight * conditioned_edge_prob(&g, p, 0, alpha, &revealed, target).unwrap();
            }
        }
        assert!((total - marginal).abs() < 1e-10);
    }

    #[test]
    fn record_round_trips_through_json() {
        let r = oracle_record(&gen_complete(4).unwrap(), 0.5, 0.5, 0).unwrap();
        let back: OracleRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
