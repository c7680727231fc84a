use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{clamp_probability, cluster_volumes, ClusterVolumes, UnionFind};
use crate::error::{Error, Result};
use crate::graph::{Graph, ROOT};
use crate::rng::UniformStream;
use crate::stats::{Frequency, MeanEstimate};

/// Per-replica cluster volumes from `reps` independent samples of `P_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSummary {
    pub p: f64,
    pub reps: u64,
    pub seed: u64,
    num_vertices: usize,
    volumes: Vec<ClusterVolumes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EstimateRecord {
    pub p: f64,
    pub reps: u64,
    pub seed: u64,
    pub alpha: f64,
    pub mean_k1: MeanEstimate,
    pub mean_k2: MeanEstimate,
    pub mean_ko: MeanEstimate,
    pub prob_k1_geq_alpha: Frequency,
    pub prob_k2_geq_alpha: Frequency,
}

impl EstimateSummary {
    fn density(&self, volume: u32) -> f64 {
        volume as f64 / self.num_vertices as f64
    }

    pub fn mean_k1(&self) -> MeanEstimate {
        MeanEstimate::from_samples(self.volumes.iter().map(|v| self.density(v.k1)))
    }

    pub fn mean_k2(&self) -> MeanEstimate {
        MeanEstimate::from_samples(self.volumes.iter().map(|v| self.density(v.k2)))
    }

    pub fn mean_ko(&self) -> MeanEstimate {
        MeanEstimate::from_samples(self.volumes.iter().map(|v| self.density(v.ko)))
    }

    pub fn prob_k1_geq(&self, alpha: f64) -> Frequency {
        let hits = self.volumes.iter().filter(|v| self.density(v.k1) >= alpha).count();
        Frequency::new(hits as u64, self.reps)
    }

    pub fn prob_k2_geq(&self, alpha: f64) -> Frequency {
        let hits = self.volumes.iter().filter(|v| self.density(v.k2) >= alpha).count();
        Frequency::new(hits as u64, self.reps)
    }

    /// Largest-cluster densities of each replica, in replica order.
    pub fn k1_densities(&self) -> Vec<f64> {
        self.volumes.iter().map(|v| self.density(v.k1)).collect()
    }

    pub fn record(&self, alpha: f64) -> EstimateRecord {
        EstimateRecord {
            p: self.p,
            reps: self.reps,
            seed: self.seed,
            alpha,
            mean_k1: self.mean_k1(),
            mean_k2: self.mean_k2(),
            mean_ko: self.mean_ko(),
            prob_k1_geq_alpha: self.prob_k1_geq(alpha),
            prob_k2_geq_alpha: self.prob_k2_geq(alpha),
        }
    }
}

/// Monte Carlo summary of `reps` samples of `P_p`; replica `r` uses stream
/// `r` of `seed`, so the result does not depend on the thread count.
pub fn estimate(g: &Graph, p: f64, reps: u64, seed: u64) -> Result<EstimateSummary> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    let q = clamp_probability(p);
    let n = g.num_vertices();
    let volumes = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut stream = UniformStream::new(seed, r);
            let mut uf = UnionFind::new(n);
            for &(u, v) in g.edges() {
                if stream.next_uniform() < q {
                    uf.union(u, v);
                }
            }
            cluster_volumes(&mut uf, n, ROOT)
        })
        .collect();
    Ok(EstimateSummary { p, reps, seed, num_vertices: n, volumes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_hypercube};
    use crate::percolation::{clusters, sample_replica};

    #[test]
    fn full_parameter_gives_one_cluster() {
        let g = gen_hypercube(4).unwrap();
        let s = estimate(&g, 1.0, 20, 3).unwrap();
        assert_eq!(s.mean_k1().mean, 1.0);
        assert_eq!(s.mean_k2().mean, 0.0);
        assert_eq!(s.prob_k1_geq(1.0).value, 1.0);
    }

    #[test]
    fn zero_reps_is_invalid() {
        assert!(estimate(&gen_complete(3).unwrap(), 0.5, 0, 1).is_err());
    }

    #[test]
    fn replicas_agree_with_single_samples() {
        let g = gen_complete(12).unwrap();
        let s = estimate(&g, 0.2, 16, 77).unwrap();
        let direct: Vec<f64> = (0..16).map(|r| clusters(&g, &sample_replica(&g, 0.2, 77, r)).unwrap().density_k1).collect();
        assert_eq!(s.k1_densities(), direct);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = gen_complete(30).unwrap();
        let a = estimate(&g, 0.05, 200, 5).unwrap();
        let b = estimate(&g, 0.05, 200, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a.record(0.2)).unwrap(), serde_json::to_string(&b.record(0.2)).unwrap());
    }
}
