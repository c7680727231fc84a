//! Bernoulli bond percolation on a [`Graph`] and the cluster statistics of
//! a single configuration.

mod estimate;
mod union_find;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, ROOT};
use crate::rng::UniformStream;

pub use estimate::{estimate, EstimateRecord, EstimateSummary};
pub use union_find::UnionFind;

/// Open/closed state of every edge, indexed by edge index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    graph_id: String,
    open: Vec<bool>,
}

impl Configuration {
    pub fn new(g: &Graph, open: Vec<bool>) -> Result<Configuration> {
        if open.len() != g.num_edges() {
            return Err(Error::InvalidArgument(format!(
                "configuration has {} entries but graph has {} edges",
                open.len(),
                g.num_edges()
            )));
        }
        Ok(Configuration { graph_id: g.id().to_owned(), open })
    }

    pub fn all_closed(g: &Graph) -> Configuration {
        Configuration { graph_id: g.id().to_owned(), open: vec![false; g.num_edges()] }
    }

    pub fn all_open(g: &Graph) -> Configuration {
        Configuration { graph_id: g.id().to_owned(), open: vec![true; g.num_edges()] }
    }

    pub fn from_open_edges(g: &Graph, edges: &[usize]) -> Result<Configuration> {
        let mut c = Configuration::all_closed(g);
        for &e in edges {
            if e >= g.num_edges() {
                return Err(Error::InvalidIndex(format!("edge {e} out of range")));
            }
            c.open[e] = true;
        }
        Ok(c)
    }

    /// Configuration whose bit `e` of `mask` gives the state of edge `e`.
    pub fn from_mask(g: &Graph, mask: u64) -> Configuration {
        let open = (0..g.num_edges()).map(|e| mask >> e & 1 == 1).collect();
        Configuration { graph_id: g.id().to_owned(), open }
    }

    pub fn graph_id(&self) -> &str {
        &self.graph_id
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.open[e]
    }

    pub fn set(&mut self, e: usize, open: bool) {
        self.open[e] = open;
    }

    pub fn states(&self) -> &[bool] {
        &self.open
    }

    pub fn open_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.open.iter().enumerate().filter(|(_, &o)| o).map(|(e, _)| e)
    }

    pub fn num_open(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// Edgewise `self ⪯ other`.
    pub fn dominated_by(&self, other: &Configuration) -> bool {
        self.open.len() == other.open.len() && self.open.iter().zip(&other.open).all(|(&a, &b)| !a || b)
    }

    /// Bit `e` set iff edge `e` is open. Only meaningful for `len() <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.open_edges().fold(0, |m, e| m | 1 << e)
    }

    pub fn to_bitstring(&self) -> String {
        self.open.iter().map(|&o| if o { '1' } else { '0' }).collect()
    }

    pub fn dump(&self) -> ConfigurationDump {
        ConfigurationDump { graph_hash: self.graph_id.clone(), edges: self.len(), bits: self.to_bitstring() }
    }

    pub fn from_dump(g: &Graph, dump: &ConfigurationDump) -> Result<Configuration> {
        if dump.graph_hash != g.id() {
            return Err(Error::InvalidArgument(format!("dump belongs to graph {}, not {}", dump.graph_hash, g.id())));
        }
        let open = dump
            .bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("bad bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if open.len() != dump.edges {
            return Err(Error::InvalidArgument("bitstring length differs from declared edge count".into()));
        }
        Configuration::new(g, open)
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.open.len() != g.num_edges() || self.graph_id != g.id() {
            return Err(Error::InvalidArgument("configuration does not belong to this graph".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationDump {
    pub graph_hash: String,
    pub edges: usize,
    pub bits: String,
}

/// Clusters of one configuration, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ClusterReport {
    /// Cluster volumes in decreasing order; equal volumes are ordered by
    /// their smallest vertex.
    pub cluster_sizes: Vec<usize>,
    pub num_vertices: usize,
    pub density_k1: f64,
    pub density_k2: f64,
    /// Density of the cluster containing `root`.
    pub density_o: f64,
    pub root: usize,
    /// Rank of each vertex's cluster in `cluster_sizes`.
    pub cluster_of: Vec<usize>,
}

/// Samples `P_p` for replica 0 of `seed`.
pub fn sample(g: &Graph, p: f64, seed: u64) -> Configuration {
    sample_replica(g, p, seed, 0)
}

/// Samples `P_p`: edge `e` is open iff its uniform is below `p`.
/// Parameters outside `[0, 1]` are clamped.
pub fn sample_replica(g: &Graph, p: f64, seed: u64, replica: u64) -> Configuration {
    let p = clamp_probability(p);
    let mut stream = UniformStream::new(seed, replica);
    let open = (0..g.num_edges()).map(|_| stream.next_uniform() < p).collect();
    Configuration { graph_id: g.id().to_owned(), open }
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    if p.is_nan() {
        0.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

pub fn clusters(g: &Graph, c: &Configuration) -> Result<ClusterReport> {
    clusters_rooted(g, c, ROOT)
}

pub fn clusters_rooted(g: &Graph, c: &Configuration, root: usize) -> Result<ClusterReport> {
    c.check_graph(g)?;
    if root >= g.num_vertices() {
        return Err(Error::InvalidIndex(format!("vertex {root} out of range")));
    }
    let n = g.num_vertices();
    let mut uf = UnionFind::new(n);
    for e in c.open_edges() {
        let (u, v) = g.edge(e);
        uf.union(u, v);
    }
    // sets() lists clusters by smallest member, so a stable sort by
    // decreasing size yields the tie-break on smallest vertex.
    let mut sets = uf.sets();
    sets.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut cluster_of = vec![0; n];
    for (rank, s) in sets.iter().enumerate() {
        for &v in s {
            cluster_of[v] = rank;
        }
    }
    let cluster_sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
    let density = |s: usize| s as f64 / n as f64;
    Ok(ClusterReport {
        density_k1: density(cluster_sizes[0]),
        density_k2: cluster_sizes.get(1).map_or(0.0, |&s| density(s)),
        density_o: density(cluster_sizes[cluster_of[root]]),
        root,
        cluster_sizes,
        num_vertices: n,
        cluster_of,
    })
}

/// Volume of the cluster of `root` in the configuration `open`, by search.
pub(crate) fn root_cluster_size(g: &Graph, open: &[bool], root: usize) -> usize {
    let mut seen = vec![false; g.num_vertices()];
    let mut stack = vec![root];
    seen[root] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(w, e) in g.adjacency(v) {
            if open[e] && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count
}

/// Whether `e` is pivotal for `{‖K_o‖ >= alpha}`: closing it leaves the
/// cluster of `o` below density `alpha` while opening it lifts it to at
/// least `alpha`. The current state of `e` in `c` plays no role.
pub fn is_pivotal(g: &Graph, c: &Configuration, e: usize, o: usize, alpha: f64) -> Result<bool> {
    c.check_graph(g)?;
    if e >= g.num_edges() {
        return Err(Error::InvalidIndex(format!("edge {e} out of range")));
    }
    if o >= g.num_vertices() {
        return Err(Error::InvalidIndex(format!("vertex {o} out of range")));
    }
    let n = g.num_vertices() as f64;
    let mut open = c.open.clone();
    open[e] = false;
    let without = root_cluster_size(g, &open, o) as f64 / n;
    if without >= alpha {
        return Ok(false);
    }
    open[e] = true;
    let with = root_cluster_size(g, &open, o) as f64 / n;
    Ok(with >= alpha)
}

/// Largest, second-largest and root cluster volumes, without building a
/// full report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ClusterVolumes {
    pub k1: u32,
    pub k2: u32,
    pub ko: u32,
}

pub(crate) fn cluster_volumes(uf: &mut UnionFind, n: usize, root: usize) -> ClusterVolumes {
    let (mut k1, mut k2) = (0, 0);
    for v in 0..n {
        if uf.find(v) == v {
            let s = uf.set_size(v);
            if s > k1 {
                k2 = k1;
                k1 = s;
            } else if s > k2 {
                k2 = s;
            }
        }
    }
    ClusterVolumes { k1: k1 as u32, k2: k2 as u32, ko: uf.set_size(root) as u32 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_hypercube, gen_torus};
    use proptest::prelude::*;

    #[test]
    fn boundary_parameters() {
        let g = gen_complete(10).unwrap();
        assert_eq!(sample(&g, 0.0, 1).num_open(), 0);
        assert_eq!(sample(&g, 1.0, 1).num_open(), 45);
        assert_eq!(sample(&g, 1.3, 1).num_open(), 45);
        assert_eq!(sample(&g, -0.2, 1).num_open(), 0);
    }

    #[test]
    fn k4_cluster_examples() {
        let g = gen_complete(4).unwrap();
        let r = clusters(&g, &Configuration::all_closed(&g)).unwrap();
        assert_eq!(r.cluster_sizes, vec![1, 1, 1, 1]);
        assert_eq!(r.density_k1, 0.25);

        let e01 = g.edge_index(0, 1).unwrap();
        let e23 = g.edge_index(2, 3).unwrap();
        let r = clusters(&g, &Configuration::from_open_edges(&g, &[e01, e23]).unwrap()).unwrap();
        assert_eq!(r.cluster_sizes, vec![2, 2]);
        assert_eq!((r.density_k1, r.density_k2), (0.5, 0.5));
        // tie broken by smallest vertex: {0,1} ranks first
        assert_eq!(r.cluster_of, vec![0, 0, 1, 1]);
    }

    #[test]
    fn c5_path_cluster() {
        let g = gen_cycle(5).unwrap();
        let open = [g.edge_index(0, 1).unwrap(), g.edge_index(1, 2).unwrap()];
        let r = clusters(&g, &Configuration::from_open_edges(&g, &open).unwrap()).unwrap();
        assert_eq!(r.cluster_sizes, vec![3, 1, 1]);
        assert_eq!(r.density_k1, 3.0 / 5.0);
        assert_eq!(r.density_o, 3.0 / 5.0);
    }

    #[test]
    fn mismatched_configuration_is_rejected() {
        let g = gen_complete(4).unwrap();
        let h = gen_cycle(6).unwrap();
        assert!(matches!(clusters(&g, &Configuration::all_open(&h)), Err(Error::InvalidArgument(_))));
        assert!(Configuration::new(&g, vec![true; 5]).is_err());
    }

    #[test]
    fn pivotal_examples() {
        let g = gen_complete(4).unwrap();
        let path = [g.edge_index(0, 1).unwrap(), g.edge_index(1, 2).unwrap()];
        let c = Configuration::from_open_edges(&g, &path).unwrap();
        assert!(is_pivotal(&g, &c, g.edge_index(2, 3).unwrap(), 0, 0.9).unwrap());

        let c = Configuration::from_open_edges(&g, &[g.edge_index(0, 1).unwrap()]).unwrap();
        assert!(!is_pivotal(&g, &c, g.edge_index(1, 3).unwrap(), 0, 0.9).unwrap());

        // density floor: nothing is pivotal when alpha <= 1/|V|
        for e in 0..g.num_edges() {
            assert!(!is_pivotal(&g, &c, e, 0, 0.25).unwrap());
        }
        assert!(is_pivotal(&g, &c, 99, 0, 0.5).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let g = gen_hypercube(3).unwrap();
        let c = sample(&g, 0.5, 11);
        let d = c.dump();
        assert_eq!(d.bits.len(), 12);
        assert_eq!(Configuration::from_dump(&g, &d).unwrap(), c);
        assert!(Configuration::from_dump(&gen_cycle(12).unwrap(), &d).is_err());
    }

    /// Components by repeated depth-first search over an adjacency matrix.
    fn brute_force_components(g: &Graph, c: &Configuration) -> Vec<Vec<usize>> {
        let n = g.num_vertices();
        let mut adj = vec![vec![false; n]; n];
        for e in c.open_edges() {
            let (u, v) = g.edge(e);
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let mut label = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![s];
            label[s] = comps.len();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for w in 0..n {
                    if adj[v][w] && label[w] == usize::MAX {
                        label[w] = comps.len();
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        prop_oneof![
            (2usize..12).prop_map(|n| gen_complete(n).unwrap()),
            (3usize..40).prop_map(|n| gen_cycle(n).unwrap()),
            (1usize..7).prop_map(|d| gen_hypercube(d).unwrap()),
            (3usize..9).prop_map(|s| gen_torus(&[s, s]).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn union_find_matches_brute_force(g in small_graph(), p in 0.0f64..1.0, seed in any::<u64>()) {
            let c = sample(&g, p, seed);
            let r = clusters(&g, &c).unwrap();
            let comps = brute_force_components(&g, &c);
            prop_assert_eq!(r.cluster_sizes.iter().sum::<usize>(), g.num_vertices());
            prop_assert_eq!(&r.cluster_sizes, &comps.iter().map(Vec::len).collect::<Vec<_>>());
            for (rank, comp) in comps.iter().enumerate() {
                for &v in comp {
                    prop_assert_eq!(r.cluster_of[v], rank);
                }
            }
            prop_assert_eq!(r.density_k1, r.cluster_sizes[0] as f64 / g.num_vertices() as f64);
            prop_assert_eq!(r.density_o, r.cluster_sizes[r.cluster_of[0]] as f64 / g.num_vertices() as f64);
        }

        #[test]
        fn sampling_is_deterministic(g in small_graph(), p in 0.0f64..1.0, seed in any::<u64>()) {
            prop_assert_eq!(sample(&g, p, seed), sample(&g, p, seed));
        }

        #[test]
        fn shared_uniforms_are_monotone(g in small_graph(), p in 0.0f64..1.0, dp in 0.0f64..0.5, seed in any::<u64>()) {
            let lo = sample(&g, p, seed);
            let hi = sample(&g, p + dp, seed);
            prop_assert!(lo.dominated_by(&hi));
            let (a, b) = (clusters(&g, &lo).unwrap(), clusters(&g, &hi).unwrap());
            prop_assert!(a.density_k1 <= b.density_k1);
        }

        #[test]
        fn pivotality_definition(g in small_graph(), p in 0.0f64..1.0, seed in any::<u64>(), alpha in 0.0f64..1.0, e_pick in any::<prop::sample::Index>()) {
            let c = sample(&g, p, seed);
            let e = e_pick.index(g.num_edges());
            let mut closed = c.clone();
            closed.set(e, false);
            let mut opened = c.clone();
            opened.set(e, true);
            let without = clusters(&g, &closed).unwrap().density_o;
            let with = clusters(&g, &opened).unwrap().density_o;
            prop_assert_eq!(is_pivotal(&g, &c, e, 0, alpha).unwrap(), without < alpha && with >= alpha);
        }
    }
}
