use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{explore, ExplorationTrace, Explorer};
use crate::error::{Error, Result};
use crate::exact::{Census, CouplingConstants, ExplorationTree, NodeId};
use crate::graph::Graph;
use crate::percolation::{is_pivotal, Configuration};
use crate::rng::uniforms;
use crate::stats::Frequency;

/// One realisation of the coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CouplingOutcome {
    /// Edge states with law `P_q`.
    pub omega_q: Vec<bool>,
    /// Edge states with law `P̂`.
    pub omega_hat: Vec<bool>,
    /// `tau_fail < |E|`.
    pub error_event_a: bool,
    /// `omega_q <= omega_hat ∪ 1_A` on every edge.
    pub monotone_ok: bool,
    pub trace: ExplorationTrace,
}

/// A graph, parameters and the exploration tree of `P̂`, ready to be run
/// with any number of seeds.
#[derive(Debug, Clone)]
pub struct CouplingLab {
    graph: Graph,
    root: usize,
    tree: ExplorationTree,
    constants: CouplingConstants,
    q: f64,
}

impl CouplingLab {
    /// Uses `q = (1 - theta - delta) p`; fails with `NotApplicable` when
    /// `theta + h >= 1`.
    pub fn prepare(g: &Graph, p: f64, alpha: f64, o: usize) -> Result<CouplingLab> {
        let constants = Census::new(g, o)?.coupling_constants(p, alpha);
        let q = constants.require_q()?;
        CouplingLab::build(g, p, alpha, o, q, constants)
    }

    /// Couples `P̂` with `P_q` for a caller-chosen `q <= p`, with no
    /// applicability requirement.
    pub fn with_threshold(g: &Graph, p: f64, alpha: f64, o: usize, q: f64) -> Result<CouplingLab> {
        if q.is_nan() || q > p {
            return Err(Error::InvalidParameter(format!("q = {q} must be a number no larger than p = {p}")));
        }
        let constants = Census::new(g, o)?.coupling_constants(p, alpha);
        CouplingLab::build(g, p, alpha, o, q, constants)
    }

    fn build(g: &Graph, p: f64, alpha: f64, o: usize, q: f64, constants: CouplingConstants) -> Result<CouplingLab> {
        let tree = ExplorationTree::build(g, p, alpha, o)?;
        if !(tree.conditioning_mass() > 0.0) {
            return Err(Error::ConditioningOnNullEvent);
        }
        Ok(CouplingLab { graph: g.clone(), root: o, tree, constants, q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn constants(&self) -> &CouplingConstants {
        &self.constants
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Exact `P̂(tau_fail < |E|)` for this lab's `q`.
    pub fn exact_failure_probability(&self) -> Result<f64> {
        self.tree.tau_fail_probability(self.q)
    }

    /// Runs the coupling with the uniforms of stream `replica` of `seed`
    /// and checks every pathwise property on the outcome.
    pub fn run(&self, seed: u64, replica: u64) -> Result<CouplingOutcome> {
        let g = &self.graph;
        let m = g.num_edges();
        let u = uniforms(seed, replica, m);
        let omega_q: Vec<bool> = u.iter().map(|&x| x < self.q).collect();
        let mut omega_hat = vec![false; m];

        let mut explorer = Explorer::new(g, self.root);
        let mut node = NodeId::ROOT;
        let (mut order, mut states, mut frontier_sizes) = (Vec::new(), Vec::new(), Vec::new());
        let mut tau_fail = m;
        let mut endpoints = None;
        for t in 0..m {
            let (e, size) = explorer.next().ok_or_else(|| invariant("exploration ended early"))?;
            if self.tree.edge_at(node) != Some(e) {
                return Err(invariant("exploration tree and explorer disagree on the next edge"));
            }
            let c = self
                .tree
                .open_probability(node)
                .ok_or_else(|| invariant("history has zero mass under the conditioned measure"))?;
            if tau_fail == m && c < self.q {
                tau_fail = t;
                endpoints = Some(self.label(&explorer, e)?);
            }
            let open = u[e] < c;
            omega_hat[e] = open;
            explorer.reveal(e, open);
            node = node.child(open);
            order.push(e);
            states.push(open);
            frontier_sizes.push(size);
        }

        let hat = Configuration::new(g, omega_hat.clone())?;
        let replay = explore(g, &hat, self.root)?;
        if replay.order != order {
            return Err(invariant("revealed order differs from the exploration of omega_hat"));
        }
        let error_event_a = tau_fail < m;
        if error_event_a && tau_fail >= replay.tau_moat {
            return Err(invariant(&format!("tau_fail = {tau_fail} >= tau_moat = {}", replay.tau_moat)));
        }
        // Up to tau_fail every conditional probability was at least q.
        for (t, &e) in order.iter().enumerate().take(tau_fail) {
            if omega_q[e] && !omega_hat[e] {
                return Err(invariant(&format!("omega_q exceeds omega_hat at step {}", t + 1)));
            }
        }
        let monotone_ok = error_event_a || omega_q.iter().zip(&omega_hat).all(|(&a, &b)| !a || b);
        if !monotone_ok {
            return Err(invariant("omega_q is not dominated by omega_hat ∪ 1_A"));
        }
        for e in hat.open_edges() {
            if is_pivotal(g, &hat, e, self.root, self.tree.alpha())? {
                return Err(invariant(&format!("edge {e} is open and pivotal under the conditioning")));
            }
        }

        let (v_minus, v_plus) = endpoints.unzip();
        let trace = ExplorationTrace { order, states, tau_fail, tau_moat: replay.tau_moat, v_minus, v_plus, frontier_sizes };
        Ok(CouplingOutcome { omega_q, omega_hat, error_event_a, monotone_ok, trace })
    }

    /// `(v_-, v_+)` for the edge about to be revealed at the failure time.
    fn label(&self, explorer: &Explorer<'_>, e: usize) -> Result<(usize, usize)> {
        let (a, b) = self.graph.edge(e);
        match (explorer.is_reached(a), explorer.is_reached(b)) {
            (true, false) => Ok((a, b)),
            (false, true) => Ok((b, a)),
            (true, true) => Err(invariant("both endpoints of the failing edge are joined to the root")),
            (false, false) => Err(invariant("the failing edge does not touch the explored cluster")),
        }
    }

    /// Aggregates `reps` runs (stream `r` of `seed` for run `r`).
    pub fn domination_report(&self, reps: u64, seed: u64) -> Result<DominationReport> {
        if reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        let m = self.graph.num_edges();
        let outcomes: Vec<CouplingOutcome> = (0..reps).into_par_iter().map(|r| self.run(seed, r)).collect::<Result<_>>()?;
        let failures = outcomes.iter().filter(|o| o.error_event_a).count() as u64;
        let freq_a = Frequency::new(failures, reps);
        let marginals: Vec<EdgeMarginal> = (0..m)
            .map(|e| {
                let union = outcomes.iter().filter(|o| o.error_event_a || o.omega_hat[e]).count() as u64;
                let low = outcomes.iter().filter(|o| o.omega_q[e]).count() as u64;
                EdgeMarginal { edge: e, union_open: Frequency::new(union, reps), q_open: Frequency::new(low, reps) }
            })
            .collect();
        let h_sqrt = self.constants.h_sqrt();
        let exact = self.exact_failure_probability()?;
        let tolerance = |f: &Frequency| 4.0 * f.stderr().max((self.q.clamp(0.0, 1.0) * (1.0 - self.q.clamp(0.0, 1.0)) / reps as f64).sqrt());
        let marginals_ok = marginals.iter().all(|mg| mg.union_open.value >= self.q.min(1.0) - tolerance(&mg.union_open));
        let failure_ok = freq_a.value <= h_sqrt + 4.0 * freq_a.stderr();
        let monotone_all = outcomes.iter().all(|o| o.monotone_ok);
        Ok(DominationReport {
            p: self.tree.p(),
            alpha: self.tree.alpha(),
            theta: self.constants.theta,
            h: self.constants.h,
            q: self.q,
            freq_a: freq_a.value,
            freq_a_interval: freq_a,
            h_sqrt,
            n_runs: reps,
            exact_tau_fail_prob: exact,
            monotone_runs: outcomes.iter().filter(|o| o.monotone_ok).count() as u64,
            marginals,
            passed: failure_ok && marginals_ok && monotone_all,
        })
    }
}

fn invariant(msg: &str) -> Error {
    Error::InternalInvariant(msg.to_owned())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EdgeMarginal {
    pub edge: usize,
    /// Open frequency of `omega_hat ∪ 1_A`.
    pub union_open: Frequency,
    /// Open frequency of `omega_q`.
    pub q_open: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DominationReport {
    pub p: f64,
    pub alpha: f64,
    pub theta: f64,
    pub h: f64,
    pub q: f64,
    #[serde(rename = "freq_A")]
    pub freq_a: f64,
    #[serde(rename = "freq_A_interval")]
    pub freq_a_interval: Frequency,
    pub h_sqrt: f64,
    pub n_runs: u64,
    pub exact_tau_fail_prob: f64,
    pub monotone_runs: u64,
    pub marginals: Vec<EdgeMarginal>,
    pub passed: bool,
}

/// One coupling run (stream 0 of `seed`).
pub fn run_coupling(g: &Graph, p: f64, alpha: f64, o: usize, seed: u64) -> Result<CouplingOutcome> {
    CouplingLab::prepare(g, p, alpha, o)?.run(seed, 0)
}

pub fn domination_report(g: &Graph, p: f64, alpha: f64, o: usize, reps: u64, seed: u64) -> Result<DominationReport> {
    CouplingLab::prepare(g, p, alpha, o)?.domination_report(reps, seed)
}
