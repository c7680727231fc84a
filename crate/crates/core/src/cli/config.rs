use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::output::{fmt_num, Output, Table};
use crate::checks::run_suite;
use crate::coupling::CouplingLab;
use crate::error::{Error, Result};
use crate::estimators::{
    degree_bounds, empirical_threshold, mean_field_check, spectral_threshold, sweep, threshold_window, uniqueness_profile,
    DegreeBounds, DEFAULT_SLACK,
};
use crate::exact::{oracle_record, Census, RATIONAL_CAP};
use crate::graph::{parse_graph, spectral_radius, verify_molecular_witness, Graph, DEFAULT_TOL};
use crate::percolation::{clusters_rooted, estimate, sample, ClusterReport, ConfigurationDump};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// One experiment: a graph, an operation and its parameters.
///
/// Operation parameters sit next to the common keys, e.g.
/// `{"graph": "complete(200)", "op": "empirical_threshold", "delta": 0.05,
/// "reps": 2000, "seed": 7}`. Keys the operation does not know are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(flatten)]
    pub params: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn new(graph: Option<&str>, op: &str) -> ExperimentConfig {
        ExperimentConfig { graph: graph.map(str::to_owned), op: op.to_owned(), reps: None, seed: None, out: None, format: None, params: BTreeMap::new() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> ExperimentConfig {
        self.params.insert(key.to_owned(), serde_json::to_value(value).expect("parameters serialize"));
        self
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    fn params<T: DeserializeOwned>(&self) -> Result<T> {
        let map: serde_json::Map<String, Value> = self.params.clone().into_iter().collect();
        serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(format!("{}: {e}", self.op)))
    }

    fn graph(&self) -> Result<Graph> {
        let spec = self.graph.as_deref().ok_or_else(|| Error::Config(format!("{} needs a graph", self.op)))?;
        parse_graph(spec)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn reps(&self, default: u64) -> u64 {
        self.reps.unwrap_or(default)
    }
}

pub const OPERATIONS: [&str; 18] = [
    "gen",
    "sample",
    "estimate",
    "sweep",
    "empirical_threshold",
    "threshold_window",
    "spectral_threshold",
    "bounds",
    "mean_field_check",
    "uniqueness_profile",
    "verify_molecular",
    "exact_distribution",
    "coupling_constants",
    "exact_tau_fail_prob",
    "run_coupling",
    "coupling_trace",
    "domination_report",
    "suite",
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleParams {
    p: f64,
    #[serde(default)]
    root: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateParams {
    p: f64,
    #[serde(default = "default_alpha")]
    alpha: f64,
}

fn default_alpha() -> f64 {
    0.1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepParams {
    grid: Vec<f64>,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_alpha")]
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdParams {
    delta: f64,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowParams {
    delta: f64,
    #[serde(default = "default_low")]
    low: f64,
    #[serde(default = "default_high")]
    high: f64,
}

fn default_low() -> f64 {
    0.1
}

fn default_high() -> f64 {
    0.9
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanFieldParams {
    p: f64,
    epsilon: f64,
    #[serde(default = "default_slack")]
    slack: f64,
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniquenessParams {
    p: f64,
    beta: f64,
}

/// A probability given as a number or as an exact fraction `"a/b"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ProbabilityParam {
    Number(f64),
    Text(String),
}

impl ProbabilityParam {
    fn rational(&self) -> Result<BigRational> {
        let r = match self {
            ProbabilityParam::Number(x) => BigRational::from_float(*x).ok_or_else(|| Error::InvalidParameter(format!("p = {x}")))?,
            ProbabilityParam::Text(s) => {
                let (a, b) = s.split_once('/').unwrap_or((s, "1"));
                let parse = |t: &str| t.trim().parse::<num_bigint::BigInt>().map_err(|_| Error::InvalidParameter(format!("bad fraction `{s}`")));
                let (a, b) = (parse(a)?, parse(b)?);
                if b.is_zero() {
                    return Err(Error::InvalidParameter(format!("bad fraction `{s}`")));
                }
                BigRational::new(a, b)
            }
        };
        if r < BigRational::zero() || r > BigRational::one() {
            return Err(Error::InvalidParameter(format!("p = {r} is not a probability")));
        }
        Ok(r)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactParams {
    p: ProbabilityParam,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingParams {
    p: f64,
    alpha: f64,
    #[serde(default)]
    root: usize,
    #[serde(default)]
    q: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteParams {
    name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GraphSummary {
    pub family: String,
    pub graph_hash: String,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub degree: usize,
    pub spectral_radius: f64,
    pub molecular: bool,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SampleOutput {
    pub graph: String,
    pub p: f64,
    pub seed: u64,
    pub configuration: ConfigurationDump,
    pub clusters: ClusterReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BoundsReport {
    pub graph: String,
    pub degree: usize,
    pub num_vertices: usize,
    pub degree_bounds: DegreeBounds,
    pub spectral_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MolecularVerification {
    pub graph: String,
    pub atom_count: usize,
    pub bridge_count: usize,
    pub components: usize,
    pub atoms_match: bool,
    pub invariant_ok: bool,
    /// `|F| / |V|`.
    pub density_ratio: f64,
    pub size_ok: bool,
    pub satisfied: bool,
}

/// Exact rational values, reported when `|E|` is small enough.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RationalValues {
    pub p: String,
    pub connected_probability: String,
    pub theta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExactSummary {
    pub graph: String,
    pub graph_hash: String,
    pub p: f64,
    pub num_edges: usize,
    /// `2^|E|`.
    pub configurations: u64,
    /// Configurations whose open subgraph is connected.
    pub connected_configurations: u64,
    pub connected_probability: f64,
    pub theta: f64,
    pub total_weight: f64,
    pub rational: Option<RationalValues>,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("outputs serialize") + "\n"
}

fn rows(header: &[&str], rows: Vec<Vec<String>>) -> Table {
    Table { header: header.iter().map(|s| s.to_string()).collect(), rows }
}

fn b(x: bool) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Executes the configured operation.
pub fn run(config: &ExperimentConfig) -> Result<Output> {
    let seed = config.seed();
    let out = match config.op.as_str() {
        "gen" => {
            config.params::<NoParams>()?;
            let g = config.graph()?;
            let s = GraphSummary {
                family: g.family().to_owned(),
                graph_hash: g.id().to_owned(),
                num_vertices: g.num_vertices(),
                num_edges: g.num_edges(),
                degree: g.degree(),
                spectral_radius: spectral_radius(&g, DEFAULT_TOL)?,
                molecular: g.witness().is_some(),
                edges: g.edges().to_vec(),
            };
            let table = rows(&["u", "v"], s.edges.iter().map(|&(u, v)| vec![u.to_string(), v.to_string()]).collect());
            Output::new(json(&s), table)
        }
        "sample" => {
            let p: SampleParams = config.params()?;
            let g = config.graph()?;
            let c = sample(&g, p.p, seed);
            let report = clusters_rooted(&g, &c, p.root)?;
            let table = rows(&["edge", "u", "v", "open"], (0..g.num_edges()).map(|e| {
                let (u, v) = g.edge(e);
                vec![e.to_string(), u.to_string(), v.to_string(), b(c.is_open(e))]
            }).collect());
            Output::new(json(&SampleOutput { graph: g.family().to_owned(), p: p.p, seed, configuration: c.dump(), clusters: report }), table)
        }
        "estimate" => {
            let p: EstimateParams = config.params()?;
            let r = estimate(&config.graph()?, p.p, config.reps(1000), seed)?.record(p.alpha);
            let table = rows(
                &["p", "reps", "seed", "alpha", "mean_k1", "mean_k1_stderr", "mean_k2", "mean_k2_stderr", "mean_ko", "mean_ko_stderr", "prob_k1_geq_alpha", "prob_k1_ci_low", "prob_k1_ci_high", "prob_k2_geq_alpha", "prob_k2_ci_low", "prob_k2_ci_high"],
                vec![vec![
                    fmt_num(r.p), r.reps.to_string(), r.seed.to_string(), fmt_num(r.alpha),
                    fmt_num(r.mean_k1.mean), fmt_num(r.mean_k1.stderr), fmt_num(r.mean_k2.mean), fmt_num(r.mean_k2.stderr),
                    fmt_num(r.mean_ko.mean), fmt_num(r.mean_ko.stderr),
                    fmt_num(r.prob_k1_geq_alpha.value), fmt_num(r.prob_k1_geq_alpha.ci_low), fmt_num(r.prob_k1_geq_alpha.ci_high),
                    fmt_num(r.prob_k2_geq_alpha.value), fmt_num(r.prob_k2_geq_alpha.ci_low), fmt_num(r.prob_k2_geq_alpha.ci_high),
                ]],
            );
            Output::new(json(&r), table)
        }
        "sweep" => {
            let p: SweepParams = config.params()?;
            let r = sweep(&config.graph()?, &p.grid, p.alpha, p.beta, config.reps(1000), seed)?;
            let table = rows(
                &["p", "prob_k1_geq_alpha", "prob_k1_ci_low", "prob_k1_ci_high", "mean_k1", "mean_k1_stderr", "mean_k2", "mean_k2_stderr", "prob_k2_geq_beta", "prob_k2_ci_low", "prob_k2_ci_high"],
                r.grid
                    .iter()
                    .map(|row| {
                        vec![
                            fmt_num(row.p),
                            fmt_num(row.prob_k1_geq_alpha.value), fmt_num(row.prob_k1_geq_alpha.ci_low), fmt_num(row.prob_k1_geq_alpha.ci_high),
                            fmt_num(row.mean_k1.mean), fmt_num(row.mean_k1.stderr), fmt_num(row.mean_k2.mean), fmt_num(row.mean_k2.stderr),
                            fmt_num(row.prob_k2_geq_beta.value), fmt_num(row.prob_k2_geq_beta.ci_low), fmt_num(row.prob_k2_geq_beta.ci_high),
                        ]
                    })
                    .collect(),
            );
            Output::new(json(&r), table)
        }
        "empirical_threshold" | "spectral_threshold" => {
            let g = config.graph()?;
            let est = if config.op == "spectral_threshold" {
                config.params::<NoParams>()?;
                spectral_threshold(&g)
            } else {
                let p: ThresholdParams = config.params()?;
                let tol = p.tol.unwrap_or(0.01 / g.degree() as f64);
                empirical_threshold(&g, p.delta, config.reps(500), tol, seed)?
            };
            let method = serde_json::to_value(est.method).expect("method serializes");
            let table = rows(
                &["method", "value", "ci_low", "ci_high", "delta", "reps", "seed", "widened"],
                vec![vec![
                    method.as_str().unwrap_or_default().to_owned(), fmt_num(est.value), fmt_num(est.ci_low), fmt_num(est.ci_high),
                    opt(est.delta), est.reps.to_string(), est.seed.to_string(), b(est.widened),
                ]],
            );
            Output::new(json(&est), table)
        }
        "threshold_window" => {
            let p: WindowParams = config.params()?;
            let w = threshold_window(&config.graph()?, p.delta, config.reps(2000), seed, p.low, p.high)?;
            let table = rows(
                &["delta", "reps", "seed", "low_level", "high_level", "p_low", "p_mid", "p_high", "relative_width"],
                vec![vec![
                    fmt_num(w.delta), w.reps.to_string(), w.seed.to_string(), fmt_num(w.low_level), fmt_num(w.high_level),
                    fmt_num(w.p_low), fmt_num(w.p_mid), fmt_num(w.p_high), fmt_num(w.relative_width),
                ]],
            );
            Output::new(json(&w), table)
        }
        "bounds" => {
            config.params::<NoParams>()?;
            let g = config.graph()?;
            let r = BoundsReport {
                graph: g.family().to_owned(),
                degree: g.degree(),
                num_vertices: g.num_vertices(),
                degree_bounds: degree_bounds(&g)?,
                spectral_threshold: spectral_threshold(&g).value,
            };
            let table = rows(
                &["graph", "degree", "num_vertices", "lower", "upper", "spectral_threshold"],
                vec![vec![
                    r.graph.clone(), r.degree.to_string(), r.num_vertices.to_string(),
                    fmt_num(r.degree_bounds.lower), fmt_num(r.degree_bounds.upper), fmt_num(r.spectral_threshold),
                ]],
            );
            Output::new(json(&r), table)
        }
        "mean_field_check" => {
            let p: MeanFieldParams = config.params()?;
            let r = mean_field_check(&config.graph()?, p.p, p.epsilon, config.reps(400), seed, p.slack)?;
            let table = rows(
                &["p", "epsilon", "baseline", "baseline_stderr", "lhs", "lhs_stderr", "rhs", "slack", "pass"],
                vec![vec![
                    fmt_num(r.p), fmt_num(r.epsilon), fmt_num(r.baseline.mean), fmt_num(r.baseline.stderr),
                    fmt_num(r.lhs.mean), fmt_num(r.lhs.stderr), fmt_num(r.rhs), fmt_num(r.slack), b(r.pass),
                ]],
            );
            Output::new(json(&r), table)
        }
        "uniqueness_profile" => {
            let p: UniquenessParams = config.params()?;
            let r = uniqueness_profile(&config.graph()?, p.p, p.beta, config.reps(1000), seed)?;
            let f = r.prob_k2_geq_beta;
            let table = rows(
                &["p", "beta", "prob_k2_geq_beta", "ci_low", "ci_high", "mean_k1", "mean_k2"],
                vec![vec![fmt_num(r.p), fmt_num(r.beta), fmt_num(f.value), fmt_num(f.ci_low), fmt_num(f.ci_high), fmt_num(r.mean_k1.mean), fmt_num(r.mean_k2.mean)]],
            );
            Output::new(json(&r), table)
        }
        "verify_molecular" => {
            config.params::<NoParams>()?;
            let g = config.graph()?;
            let w = g.witness().ok_or_else(|| Error::InvalidArgument(format!("{} carries no molecular witness", g.family())))?;
            let r = verify_molecular_witness(&g, w)?;
            let v = MolecularVerification {
                graph: g.family().to_owned(),
                atom_count: w.atom_count(),
                bridge_count: w.bridges.len(),
                components: r.components,
                atoms_match: r.atoms_match,
                invariant_ok: r.invariant_ok,
                density_ratio: r.density_ratio.to_f64().unwrap_or(f64::NAN),
                size_ok: r.size_ok,
                satisfied: r.satisfied(w.atom_count()),
            };
            let table = rows(
                &["graph", "atom_count", "bridge_count", "components", "atoms_match", "invariant_ok", "density_ratio", "size_ok", "satisfied"],
                vec![vec![
                    v.graph.clone(), v.atom_count.to_string(), v.bridge_count.to_string(), v.components.to_string(),
                    b(v.atoms_match), b(v.invariant_ok), fmt_num(v.density_ratio), b(v.size_ok), b(v.satisfied),
                ]],
            );
            Output::new(json(&v), table)
        }
        "exact_distribution" => {
            let p: ExactParams = config.params()?;
            let g = config.graph()?;
            let exact_p = p.p.rational()?;
            let pf = exact_p.to_f64().unwrap_or(f64::NAN);
            let census = Census::new(&g, 0)?;
            let n = g.num_vertices();
            let rational = if g.num_edges() <= RATIONAL_CAP {
                let conn = census.probability_rational(&exact_p, |k1, _, _| k1 == n)?;
                let nn = num_bigint::BigInt::from(n);
                let theta = census.expect_rational(&exact_p, |k1, _, _| BigRational::new(k1.into(), nn.clone()))?;
                Some(RationalValues { p: exact_p.to_string(), connected_probability: conn.to_string(), theta: theta.to_string() })
            } else {
                None
            };
            let s = ExactSummary {
                graph: g.family().to_owned(),
                graph_hash: g.id().to_owned(),
                p: pf,
                num_edges: g.num_edges(),
                configurations: 1u64 << g.num_edges(),
                connected_configurations: census.count(|k1, _, _| k1 == n),
                connected_probability: census.connected_probability(pf),
                theta: census.theta(pf),
                total_weight: census.probability(pf, |_, _, _| true),
                rational,
            };
            let table = rows(
                &["graph", "p", "num_edges", "configurations", "connected_configurations", "connected_probability", "theta", "total_weight"],
                vec![vec![
                    s.graph.clone(), fmt_num(s.p), s.num_edges.to_string(), s.configurations.to_string(), s.connected_configurations.to_string(),
                    fmt_num(s.connected_probability), fmt_num(s.theta), fmt_num(s.total_weight),
                ]],
            );
            Output::new(json(&s), table)
        }
        "coupling_constants" | "exact_tau_fail_prob" => {
            let p: CouplingParams = config.params()?;
            if p.q.is_some() {
                return Err(Error::Config(format!("{} does not take q", config.op)));
            }
            let r = oracle_record(&config.graph()?, p.p, p.alpha, p.root)?;
            if config.op == "exact_tau_fail_prob" && !r.applicable {
                return Err(Error::NotApplicable { sum: r.theta + r.h });
            }
            let table = rows(
                &["graph", "p", "alpha", "theta", "h", "delta", "q", "applicable", "tau_fail_prob", "connected_probability"],
                vec![vec![
                    r.graph.clone(), fmt_num(r.p), fmt_num(r.alpha), fmt_num(r.theta), fmt_num(r.h), opt(r.delta), opt(r.q),
                    b(r.applicable), opt(r.tau_fail_prob), fmt_num(r.connected_probability),
                ]],
            );
            Output::new(json(&r), table)
        }
        "run_coupling" | "coupling_trace" | "domination_report" => {
            let p: CouplingParams = config.params()?;
            let g = config.graph()?;
            let lab = match p.q {
                Some(q) => CouplingLab::with_threshold(&g, p.p, p.alpha, p.root, q)?,
                None => CouplingLab::prepare(&g, p.p, p.alpha, p.root)?,
            };
            if config.op == "domination_report" {
                let r = lab.domination_report(config.reps(10_000), seed)?;
                let table = rows(
                    &["edge", "union_open", "union_ci_low", "union_ci_high", "q_open", "q_ci_low", "q_ci_high"],
                    r.marginals
                        .iter()
                        .map(|m| {
                            vec![
                                m.edge.to_string(), fmt_num(m.union_open.value), fmt_num(m.union_open.ci_low), fmt_num(m.union_open.ci_high),
                                fmt_num(m.q_open.value), fmt_num(m.q_open.ci_low), fmt_num(m.q_open.ci_high),
                            ]
                        })
                        .collect(),
                );
                let passed = r.passed;
                Output::new(json(&r), table).with_success(passed)
            } else {
                let o = lab.run(seed, 0)?;
                let table = rows(
                    &["step", "edge", "state", "eligible_frontier_size", "omega_q"],
                    o.trace
                        .steps()
                        .map(|s| vec![s.step.to_string(), s.edge.to_string(), b(s.state), s.eligible_frontier_size.to_string(), b(o.omega_q[s.edge])])
                        .collect(),
                );
                let text = if config.op == "coupling_trace" { o.trace.to_json_lines() } else { json(&o) };
                Output::new(text, table)
            }
        }
        "suite" => {
            let p: SuiteParams = config.params()?;
            let r = run_suite(&p.name)?;
            let table = rows(
                &["id", "passed", "description", "detail"],
                r.checks.iter().map(|c| vec![c.id.clone(), b(c.passed), c.description.clone(), c.detail.clone()]).collect(),
            );
            let passed = r.passed;
            Output::new(json(&r), table).with_success(passed)
        }
        other => return Err(Error::UnknownOperation(other.to_owned())),
    };
    Ok(out)
}
