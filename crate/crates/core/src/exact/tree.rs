use super::{check_cap, exact_cap, Census, EdgeMasks};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::clamp_probability;

/// A node of the exploration tree: a history of revealed edge states.
///
/// Nodes use heap numbering: the root is 1, and node `i` has closed child
/// `2i` and open child `2i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(1);

    pub fn child(self, open: bool) -> NodeId {
        NodeId(2 * self.0 + open as usize)
    }

    /// Number of edges revealed so far.
    pub fn depth(self) -> usize {
        self.0.ilog2() as usize
    }
}

/// Every history of the exploration process, with the mass
/// `P_p(history and ‖K_o‖ < alpha)` of each.
///
/// The exploration order depends only on the states revealed so far, so the
/// whole process lives on a binary tree of depth `|E|`; conditional edge
/// probabilities under `P_p(· | ‖K_o‖ < alpha)` are ratios of node masses.
#[derive(Debug, Clone)]
pub struct ExplorationTree {
    num_edges: usize,
    p: f64,
    alpha: f64,
    root: usize,
    mass: Vec<f64>,
    next_edge: Vec<u8>,
}

struct Builder<'a> {
    masks: EdgeMasks,
    p: f64,
    alpha: f64,
    mass: &'a mut [f64],
    next_edge: &'a mut [u8],
    m: usize,
}

impl Builder<'_> {
    fn select(&self, revealed: u64, reached: u64) -> usize {
        let unrevealed = (0..self.m).filter(|&e| revealed >> e & 1 == 0);
        let mut fallback = None;
        for e in unrevealed {
            if self.masks.ends[e] & reached != 0 {
                return e;
            }
            fallback.get_or_insert(e);
        }
        fallback.expect("an unrevealed edge exists below full depth")
    }

    fn fill(&mut self, node: usize, depth: usize, revealed: u64, reached: u64, weight: f64) -> f64 {
        let z = if depth == self.m {
            if (reached.count_ones() as f64 / self.masks.n as f64) < self.alpha {
                weight
            } else {
                0.0
            }
        } else {
            let e = self.select(revealed, reached);
            self.next_edge[node] = e as u8;
            let revealed = revealed | 1 << e;
            let grown = if self.masks.ends[e] & reached != 0 { reached | self.masks.ends[e] } else { reached };
            let closed = self.fill(2 * node, depth + 1, revealed, reached, weight * (1.0 - self.p));
            let open = self.fill(2 * node + 1, depth + 1, revealed, grown, weight * self.p);
            closed + open
        };
        self.mass[node] = z;
        z
    }
}

impl ExplorationTree {
    pub fn build(g: &Graph, p: f64, alpha: f64, o: usize) -> Result<ExplorationTree> {
        ExplorationTree::with_cap(g, p, alpha, o, exact_cap())
    }

    pub fn with_cap(g: &Graph, p: f64, alpha: f64, o: usize, cap: usize) -> Result<ExplorationTree> {
        check_cap(g, cap)?;
        if o >= g.num_vertices() {
            return Err(Error::InvalidIndex(format!("vertex {o} out of range")));
        }
        if alpha.is_nan() {
            return Err(Error::InvalidParameter("alpha is NaN".into()));
        }
        let m = g.num_edges();
        let p = clamp_probability(p);
        let mut mass = vec![0.0; 1 << (m + 1)];
        let mut next_edge = vec![0u8; 1 << m];
        let mut builder = Builder { masks: EdgeMasks::new(g), p, alpha, mass: &mut mass, next_edge: &mut next_edge, m };
        builder.fill(1, 0, 0, 1 << o, 1.0);
        Ok(ExplorationTree { num_edges: m, p, alpha, root: o, mass, next_edge })
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn root_vertex(&self) -> usize {
        self.root
    }

    /// `P_p(‖K_o‖ < alpha)`.
    pub fn conditioning_mass(&self) -> f64 {
        self.mass[1]
    }

    /// `P_p(history and ‖K_o‖ < alpha)`.
    pub fn mass(&self, node: NodeId) -> f64 {
        self.mass[node.0]
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        node.depth() == self.num_edges
    }

    /// The edge revealed at this node, `None` at a leaf.
    pub fn edge_at(&self, node: NodeId) -> Option<usize> {
        (!self.is_leaf(node)).then(|| self.next_edge[node.0] as usize)
    }

    /// Conditional probability that the next edge is open given the
    /// history, or `None` at a leaf or a history of zero mass.
    pub fn open_probability(&self, node: NodeId) -> Option<f64> {
        if self.is_leaf(node) || self.mass[node.0] <= 0.0 {
            return None;
        }
        Some(self.mass[node.child(true).0] / self.mass[node.0])
    }

    /// `P̂(tau_fail < |E|)` for the threshold `q`, where `tau_fail` is the
    /// first time the conditional probability of the next edge drops below
    /// `q`.
    pub fn tau_fail_probability(&self, q: f64) -> Result<f64> {
        if !(self.mass[1] > 0.0) {
            return Err(Error::ConditioningOnNullEvent);
        }
        Ok(self.failing_mass(NodeId::ROOT, q) / self.mass[1])
    }

    fn failing_mass(&self, node: NodeId, q: f64) -> f64 {
        match self.open_probability(node) {
            None => 0.0,
            Some(c) if c < q => self.mass[node.0],
            Some(_) => self.failing_mass(node.child(false), q) + self.failing_mass(node.child(true), q),
        }
    }
}

/// Exact `P̂(tau_fail < |E|)` with `q` from the coupling constants of `g`;
/// errors with `NotApplicable` when `theta + h >= 1`.
pub fn exact_tau_fail_prob(g: &Graph, p: f64, alpha: f64, o: usize) -> Result<f64> {
    let q = Census::new(g, o)?.coupling_constants(p, alpha).require_q()?;
    ExplorationTree::build(g, p, alpha, o)?.tau_fail_probability(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{conditioned_edge_prob, coupling_constants};
    use crate::graph::{gen_complete, gen_cycle, gen_hypercube};
    use approx::assert_abs_diff_eq;

    fn histories(tree: &ExplorationTree, node: NodeId, path: &mut Vec<(usize, bool)>, out: &mut Vec<(NodeId, Vec<(usize, bool)>)>) {
        if tree.is_leaf(node) {
            return;
        }
        out.push((node, path.clone()));
        let e = tree.edge_at(node).unwrap();
        for open in [false, true] {
            path.push((e, open));
            histories(tree, node.child(open), path, out);
            path.pop();
        }
    }

    #[test]
    fn conditional_probabilities_match_direct_sums() {
        for (g, p, alpha) in [(gen_complete(4).unwrap(), 0.4, 0.6), (gen_cycle(5).unwrap(), 0.7, 0.5)] {
            let tree = ExplorationTree::build(&g, p, alpha, 0).unwrap();
            let mut all = Vec::new();
            histories(&tree, NodeId::ROOT, &mut Vec::new(), &mut all);
            for (node, path) in all {
                let e = tree.edge_at(node).unwrap();
                match tree.open_probability(node) {
                    Some(c) => {
                        let direct = conditioned_edge_prob(&g, p, 0, alpha, &path, e).unwrap();
                        assert_abs_diff_eq!(c, direct, epsilon = 1e-12);
                    }
                    None => assert!(matches!(
                        conditioned_edge_prob(&g, p, 0, alpha, &path, e),
                        Err(Error::ConditioningOnNullEvent)
                    )),
                }
            }
        }
    }

    #[test]
    fn first_edges_follow_the_root() {
        let g = gen_cycle(5).unwrap(); // edges (0,1) (0,4) (1,2) (2,3) (3,4)
        let tree = ExplorationTree::build(&g, 0.5, 0.9, 0).unwrap();
        let n = NodeId::ROOT;
        assert_eq!(tree.edge_at(n), Some(0));
        assert_eq!(tree.edge_at(n.child(true)), Some(1));
        assert_eq!(tree.edge_at(n.child(true).child(true)), Some(2));
        assert_eq!(tree.edge_at(n.child(false)), Some(1));
        // both root edges closed: K_o = {0}, remaining edges by index
        assert_eq!(tree.edge_at(n.child(false).child(false)), Some(2));
    }

    #[test]
    fn vacuous_condition_never_fails() {
        let g = gen_cycle(5).unwrap();
        let tree = ExplorationTree::build(&g, 0.5, 1.5, 0).unwrap();
        assert_abs_diff_eq!(tree.conditioning_mass(), 1.0, epsilon = 1e-15);
        assert_eq!(tree.tau_fail_probability(0.4).unwrap(), 0.0);
    }

    #[test]
    fn failure_bound_on_small_instances() {
        let mut applicable = 0;
        for g in [gen_complete(4).unwrap(), gen_complete(5).unwrap(), gen_hypercube(3).unwrap()] {
            for p in [0.5, 0.6, 0.7, 0.8] {
                for alpha in [0.4, 0.5, 0.6] {
                    let c = coupling_constants(&g, p, alpha).unwrap();
                    let Some(q) = c.q else { continue };
                    applicable += 1;
                    let fail = ExplorationTree::build(&g, p, alpha, 0).unwrap().tau_fail_probability(q).unwrap();
                    assert!(fail <= c.h_sqrt() + 1e-12, "{} p={p} alpha={alpha}: {fail} > {}", g.family(), c.h_sqrt());
                }
            }
        }
        assert!(applicable > 0);
    }

    #[test]
    fn not_applicable_is_reported() {
        let k3 = gen_complete(3).unwrap();
        assert!(matches!(exact_tau_fail_prob(&k3, 0.5, 0.9, 0), Err(Error::NotApplicable { .. })));
    }
}
