use std::fs;
use std::io::{self, Write};
use std::path::Path;

use schemars::schema::RootSchema;
use schemars::{schema_for, JsonSchema};
use serde::{Deserialize, Serialize};

use super::config::{BoundsReport, ExactSummary, ExperimentConfig, Format, GraphSummary, MolecularVerification, SampleOutput};
use crate::checks::SuiteReport;
use crate::coupling::{CouplingOutcome, DominationReport, TraceStep};
use crate::error::{Error, Result};
use crate::estimators::{MeanFieldReport, SweepResult, ThresholdEstimate, ThresholdWindow, UniquenessReport};
use crate::exact::OracleRecord;
use crate::percolation::EstimateRecord;

/// Rows for CSV output, in a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// The result of one operation in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: String,
    pub table: Table,
    /// False when a report ran to completion but its checks failed.
    pub success: bool,
}

impl Output {
    pub fn new(json: String, table: Table) -> Output {
        Output { json, table, success: true }
    }

    pub fn with_success(mut self, success: bool) -> Output {
        self.success = success;
        self
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => Ok(self.json.clone().into_bytes()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).map_err(csv_error)?;
                for row in &self.table.rows {
                    w.write_record(row).map_err(csv_error)?;
                }
                w.into_inner().map_err(|e| Error::Io(e.into_error()))
            }
        }
    }

    /// Writes to `path`, or to stdout when absent.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => fs::write(p, bytes)?,
            None => io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

/// `%.12g`: twelve significant digits, trailing zeros removed, exponent
/// notation outside `[1e-5, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (11 - exp) as usize))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s.to_owned()
    }
}

/// Body written to stderr when a run fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ErrorReport {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> ErrorReport {
        ErrorReport { code: e.code().to_owned(), message: e.to_string() }
    }
}

/// Published JSON schemas, by file stem.
pub fn schemas() -> Vec<(&'static str, RootSchema)> {
    vec![
        ("experiment_config", schema_for!(ExperimentConfig)),
        ("error_report", schema_for!(ErrorReport)),
        ("graph_summary", schema_for!(GraphSummary)),
        ("sample", schema_for!(SampleOutput)),
        ("estimate", schema_for!(EstimateRecord)),
        ("sweep", schema_for!(SweepResult)),
        ("threshold_estimate", schema_for!(ThresholdEstimate)),
        ("threshold_window", schema_for!(ThresholdWindow)),
        ("bounds", schema_for!(BoundsReport)),
        ("mean_field", schema_for!(MeanFieldReport)),
        ("uniqueness", schema_for!(UniquenessReport)),
        ("molecular_verification", schema_for!(MolecularVerification)),
        ("exact_summary", schema_for!(ExactSummary)),
        ("oracle_record", schema_for!(OracleRecord)),
        ("coupling_outcome", schema_for!(CouplingOutcome)),
        ("trace_step", schema_for!(TraceStep)),
        ("domination_report", schema_for!(DominationReport)),
        ("suite_report", schema_for!(SuiteReport)),
    ]
}

/// The schema describing the JSON output of an operation.
pub fn schema_for_op(op: &str) -> Option<&'static str> {
    Some(match op {
        "gen" => "graph_summary",
        "sample" => "sample",
        "estimate" => "estimate",
        "sweep" => "sweep",
        "empirical_threshold" | "spectral_threshold" => "threshold_estimate",
        "threshold_window" => "threshold_window",
        "bounds" => "bounds",
        "mean_field_check" => "mean_field",
        "uniqueness_profile" => "uniqueness",
        "verify_molecular" => "molecular_verification",
        "exact_distribution" => "exact_summary",
        "coupling_constants" | "exact_tau_fail_prob" => "oracle_record",
        "run_coupling" => "coupling_outcome",
        "coupling_trace" => "trace_step",
        "domination_report" => "domination_report",
        "suite" => "suite_report",
        _ => return None,
    })
}
