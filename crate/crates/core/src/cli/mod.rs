//! Batch experiment runner behind the `percolab` binary.
//!
//! Every subcommand is a shorthand for an [`ExperimentConfig`]; `--config`
//! runs a config file directly. Output is JSON (default) or CSV, to stdout
//! or `--out`. Errors are reported on stderr as `{"code", "message"}` with
//! exit status 1; a suite or domination report whose checks fail exits
//! with status 2.

mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{
    run, BoundsReport, ExactSummary, ExperimentConfig, Format, GraphSummary, MolecularVerification, RationalValues, SampleOutput,
    OPERATIONS,
};
pub use output::{fmt_num, schema_for_op, schemas, ErrorReport, Output, Table};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "percolab", version, about = "Bond percolation experiments on finite transitive graphs")]
pub struct Cli {
    /// Run the experiment described by this JSON file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub reps: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdKind {
    Bisection,
    Window,
    Spectral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe a graph: size, degree, spectral radius and edge list.
    Gen { graph: String },
    /// Sample one configuration, or estimate cluster statistics with --reps.
    Sample {
        graph: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        root: Option<usize>,
    },
    /// Cluster statistics along a grid of parameters.
    Sweep {
        graph: String,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        beta: f64,
    },
    /// Threshold estimates: bisection for p_c(delta), its 10-90% window, or 1/lambda.
    Threshold {
        graph: String,
        #[arg(long, value_enum, default_value_t = ThresholdKind::Bisection)]
        method: ThresholdKind,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Degree bounds and the spectral threshold, or the mean-field check
    /// when --p and --epsilon are given.
    Bounds {
        graph: String,
        #[arg(long, requires = "epsilon")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        epsilon: Option<f64>,
        #[arg(long)]
        slack: Option<f64>,
    },
    /// Run the coupling once, print its trace, or aggregate a domination report.
    Couple {
        graph: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        root: Option<usize>,
        /// Override the threshold q (must not exceed p).
        #[arg(long)]
        q: Option<f64>,
        /// Aggregate --reps runs into a domination report.
        #[arg(long, conflicts_with = "trace")]
        report: bool,
        /// Print the exploration trace as JSON lines.
        #[arg(long)]
        trace: bool,
    },
    /// Exact enumeration: distribution summary, or coupling constants and
    /// the failure probability when --alpha is given.
    Exact {
        graph: String,
        /// A number or an exact fraction such as 1/2.
        #[arg(long)]
        p: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        root: Option<usize>,
    },
    /// Check a molecular witness, or profile second-cluster sizes with --p and --beta.
    Molecular {
        graph: String,
        #[arg(long, requires = "beta")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        beta: Option<f64>,
    },
    /// Run an acceptance battery: coupling, thresholds, molecular or bounds.
    Suite { name: String },
}

impl Command {
    pub fn to_config(&self) -> ExperimentConfig {
        let cfg = ExperimentConfig::new;
        match self {
            Command::Gen { graph } => cfg(Some(graph), "gen"),
            Command::Sample { graph, p, alpha, root } => {
                let mut c = cfg(Some(graph), "sample").param("p", p);
                if let Some(a) = alpha {
                    c = cfg(Some(graph), "estimate").param("p", p).param("alpha", a);
                }
                if let Some(r) = root {
                    c = c.param("root", r);
                }
                c
            }
            Command::Sweep { graph, grid, alpha, beta } => cfg(Some(graph), "sweep").param("grid", grid).param("alpha", alpha).param("beta", beta),
            Command::Threshold { graph, method, delta, tol } => match method {
                ThresholdKind::Spectral => cfg(Some(graph), "spectral_threshold"),
                ThresholdKind::Window => cfg(Some(graph), "threshold_window").param("delta", delta),
                ThresholdKind::Bisection => {
                    let c = cfg(Some(graph), "empirical_threshold").param("delta", delta);
                    match tol {
                        Some(t) => c.param("tol", t),
                        None => c,
                    }
                }
            },
            Command::Bounds { graph, p, epsilon, slack } => match (p, epsilon) {
                (Some(p), Some(e)) => {
                    let c = cfg(Some(graph), "mean_field_check").param("p", p).param("epsilon", e);
                    match slack {
                        Some(s) => c.param("slack", s),
                        None => c,
                    }
                }
                _ => cfg(Some(graph), "bounds"),
            },
            Command::Couple { graph, p, alpha, root, q, report, trace } => {
                let op = if *report {
                    "domination_report"
                } else if *trace {
                    "coupling_trace"
                } else {
                    "run_coupling"
                };
                let mut c = cfg(Some(graph), op).param("p", p).param("alpha", alpha);
                if let Some(r) = root {
                    c = c.param("root", r);
                }
                if let Some(q) = q {
                    c = c.param("q", q);
                }
                c
            }
            Command::Exact { graph, p, alpha, root } => {
                let p_value = p.parse::<f64>().map(serde_json::Value::from).unwrap_or_else(|_| serde_json::Value::from(p.clone()));
                match alpha {
                    None => cfg(Some(graph), "exact_distribution").param("p", p_value),
                    Some(a) => {
                        let c = cfg(Some(graph), "coupling_constants").param("p", p_value).param("alpha", a);
                        match root {
                            Some(r) => c.param("root", r),
                            None => c,
                        }
                    }
                }
            }
            Command::Molecular { graph, p, beta } => match (p, beta) {
                (Some(p), Some(b)) => cfg(Some(graph), "uniqueness_profile").param("p", p).param("beta", b),
                _ => cfg(Some(graph), "verify_molecular"),
            },
            Command::Suite { name } => cfg(None, "suite").param("name", name),
        }
    }
}

impl Cli {
    /// The experiment to run, with command-line flags taking precedence
    /// over the config file.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.command) {
            (Some(path), None) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
            (None, Some(cmd)) => cmd.to_config(),
            (Some(_), Some(_)) => return Err(Error::Config("give either --config or a subcommand, not both".into())),
            (None, None) => return Err(Error::Config("nothing to run: give a subcommand or --config".into())),
        };
        if self.seed.is_some() {
            config.seed = self.seed;
        }
        if self.reps.is_some() {
            config.reps = self.reps;
        }
        if self.out.is_some() {
            config.out.clone_from(&self.out);
        }
        if self.format.is_some() {
            config.format = self.format;
        }
        Ok(config)
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("--threads: {e}")))?;
    }
    let config = cli.experiment()?;
    let output = run(&config)?;
    output.write(config.format.unwrap_or(Format::Json), config.out.as_deref())?;
    Ok(output.success)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&ErrorReport::from(&e)).expect("error reports serialize"));
            ExitCode::FAILURE
        }
    }
}
