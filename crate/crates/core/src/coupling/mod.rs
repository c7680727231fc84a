//! The smallest-index exploration of the cluster of a root vertex, and the
//! coupling of `P_q` with `P̂ = P_p(· | ‖K_o‖ < alpha)` that it drives.

mod lab;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::Configuration;

pub use lab::{domination_report, run_coupling, CouplingLab, CouplingOutcome, DominationReport, EdgeMarginal};

/// The revealed order of a configuration and the stopping times attached
/// to it. Steps are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExplorationTrace {
    /// `order[t - 1]` is the edge revealed at step `t`.
    pub order: Vec<usize>,
    /// `states[t - 1]` is the state revealed at step `t`.
    pub states: Vec<bool>,
    /// First `t` (from 0) at which the next edge's conditional probability
    /// falls below `q`; `|E|` if it never does or no threshold applies.
    pub tau_fail: usize,
    /// Last step revealing an edge with an endpoint in `K_o`.
    pub tau_moat: usize,
    pub v_minus: Option<usize>,
    pub v_plus: Option<usize>,
    /// Number of edges eligible to be revealed before each step.
    pub frontier_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TraceStep {
    pub step: usize,
    pub edge: usize,
    pub state: bool,
    pub eligible_frontier_size: usize,
}

impl ExplorationTrace {
    pub fn steps(&self) -> impl Iterator<Item = TraceStep> + '_ {
        (0..self.order.len()).map(|i| TraceStep {
            step: i + 1,
            edge: self.order[i],
            state: self.states[i],
            eligible_frontier_size: self.frontier_sizes[i],
        })
    }

    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in self.steps() {
            let _ = writeln!(out, "{}", serde_json::to_string(&s).expect("trace steps serialize"));
        }
        out
    }
}

/// Incremental state of the exploration: the reached vertices and the
/// frontier of unrevealed edges touching them.
pub(crate) struct Explorer<'g> {
    g: &'g Graph,
    reached: Vec<bool>,
    revealed: Vec<bool>,
    frontier: BTreeSet<usize>,
    rest: BTreeSet<usize>,
}

impl<'g> Explorer<'g> {
    pub fn new(g: &'g Graph, o: usize) -> Explorer<'g> {
        let mut x = Explorer {
            g,
            reached: vec![false; g.num_vertices()],
            revealed: vec![false; g.num_edges()],
            frontier: BTreeSet::new(),
            rest: (0..g.num_edges()).collect(),
        };
        x.reach(o);
        x
    }

    fn reach(&mut self, v: usize) {
        self.reached[v] = true;
        for &(_, e) in self.g.adjacency(v) {
            if !self.revealed[e] {
                self.frontier.insert(e);
            }
        }
    }

    /// The next edge and the number of eligible edges, or `None` once
    /// everything is revealed.
    pub fn next(&self) -> Option<(usize, usize)> {
        match self.frontier.first() {
            Some(&e) => Some((e, self.frontier.len())),
            None => self.rest.first().map(|&e| (e, self.rest.len())),
        }
    }

    pub fn reveal(&mut self, e: usize, open: bool) {
        self.revealed[e] = true;
        self.frontier.remove(&e);
        self.rest.remove(&e);
        if open {
            let (u, v) = self.g.edge(e);
            if self.reached[u] != self.reached[v] {
                self.reach(if self.reached[u] { v } else { u });
            }
        }
    }

    pub fn is_reached(&self, v: usize) -> bool {
        self.reached[v]
    }
}

/// Explores `c` from `o`: while some unrevealed edge touches a vertex joined
/// to `o` by revealed open edges, the smallest such edge is revealed; then
/// the remaining edges follow in index order.
pub fn explore(g: &Graph, c: &Configuration, o: usize) -> Result<ExplorationTrace> {
    c.check_graph(g)?;
    if o >= g.num_vertices() {
        return Err(Error::InvalidArgument(format!("vertex {o} out of range")));
    }
    let m = g.num_edges();
    let mut x = Explorer::new(g, o);
    let (mut order, mut states, mut frontier_sizes) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
    while let Some((e, size)) = x.next() {
        let open = c.is_open(e);
        x.reveal(e, open);
        order.push(e);
        states.push(open);
        frontier_sizes.push(size);
    }
    let tau_moat = moat_time(g, c, o, &order);
    Ok(ExplorationTrace { order, states, tau_fail: m, tau_moat, v_minus: None, v_plus: None, frontier_sizes })
}

/// `max{t : rho_t has an endpoint in K_o}`.
fn moat_time(g: &Graph, c: &Configuration, o: usize, order: &[usize]) -> usize {
    let mut in_cluster = vec![false; g.num_vertices()];
    let mut stack = vec![o];
    in_cluster[o] = true;
    while let Some(v) = stack.pop() {
        for &(w, e) in g.adjacency(v) {
            if c.is_open(e) && !in_cluster[w] {
                in_cluster[w] = true;
                stack.push(w);
            }
        }
    }
    order
        .iter()
        .rposition(|&e| {
            let (u, v) = g.edge(e);
            in_cluster[u] || in_cluster[v]
        })
        .map_or(0, |i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle};
    use crate::percolation::sample;
    use proptest::prelude::*;

    #[test]
    fn triangle_all_open() {
        let g = gen_complete(3).unwrap();
        let t = explore(&g, &Configuration::all_open(&g), 0).unwrap();
        assert_eq!(t.order, vec![0, 1, 2]);
        assert_eq!(t.tau_moat, 3);
        assert_eq!(t.tau_fail, 3);
        assert_eq!(t.frontier_sizes, vec![2, 2, 1]);
    }

    #[test]
    fn triangle_all_closed() {
        let g = gen_complete(3).unwrap();
        let t = explore(&g, &Configuration::all_closed(&g), 0).unwrap();
        assert_eq!(t.order, vec![0, 1, 2]);
        assert_eq!(t.tau_moat, 2);
        assert_eq!(t.frontier_sizes, vec![2, 1, 1]);
    }

    #[test]
    fn four_cycle_with_one_open_edge() {
        // C_4 edges: 0:(0,1) 1:(0,3) 2:(1,2) 3:(2,3)
        let g = gen_cycle(4).unwrap();
        let c = Configuration::from_open_edges(&g, &[0]).unwrap();
        let t = explore(&g, &c, 0).unwrap();
        // after (0,1) opens, frontier {(0,3),(1,2)}; both close; (2,3) last
        assert_eq!(t.order, vec![0, 1, 2, 3]);
        // moat edges (0,1),(0,3),(1,2) occupy steps 1..=3
        assert_eq!(t.tau_moat, 3);
    }

    #[test]
    fn root_matters() {
        let g = gen_cycle(5).unwrap(); // 0:(0,1) 1:(0,4) 2:(1,2) 3:(2,3) 4:(3,4)
        let t = explore(&g, &Configuration::all_open(&g), 3).unwrap();
        assert_eq!(t.order, vec![3, 2, 0, 1, 4]);
    }

    #[test]
    fn foreign_configuration_is_rejected() {
        let c = Configuration::all_open(&gen_cycle(5).unwrap());
        assert!(explore(&gen_complete(4).unwrap(), &c, 0).is_err());
        let g = gen_cycle(5).unwrap();
        assert!(explore(&g, &c, 9).is_err());
    }

    #[test]
    fn json_lines_have_one_row_per_step() {
        let g = gen_cycle(6).unwrap();
        let t = explore(&g, &sample(&g, 0.5, 2), 0).unwrap();
        let lines: Vec<TraceStep> = t.to_json_lines().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0].step, 1);
    }

    /// Oracle: the rule restated as a quadratic scan over all edges.
    fn naive_order(g: &Graph, c: &Configuration, o: usize) -> Vec<usize> {
        let m = g.num_edges();
        let mut reached = vec![false; g.num_vertices()];
        reached[o] = true;
        let mut revealed = vec![false; m];
        let mut order = Vec::new();
        while order.len() < m {
            let touching = (0..m).find(|&e| !revealed[e] && (reached[g.edge(e).0] || reached[g.edge(e).1]));
            let e = touching.unwrap_or_else(|| (0..m).find(|&e| !revealed[e]).unwrap());
            revealed[e] = true;
            order.push(e);
            if c.is_open(e) && touching.is_some() {
                let (u, v) = g.edge(e);
                reached[u] = true;
                reached[v] = true;
            }
        }
        order
    }

    proptest! {
        #[test]
        fn order_matches_naive_rule(n in 4usize..9, p in 0.0f64..1.0, seed: u64, o in 0usize..4) {
            let g = gen_complete(n).unwrap();
            let c = sample(&g, p, seed);
            let t = explore(&g, &c, o).unwrap();
            prop_assert_eq!(&t.order, &naive_order(&g, &c, o));
            let mut sorted = t.order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..g.num_edges()).collect::<Vec<_>>());
            prop_assert!(t.tau_moat >= 1 && t.tau_moat <= g.num_edges());
        }
    }
}
