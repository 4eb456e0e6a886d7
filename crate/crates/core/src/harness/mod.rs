//! Instance I/O, generators, experiment orchestration and report export.

mod experiment;
mod generate;
mod io;
pub mod svg;

pub use experiment::{
    run_experiment, summary_rows, verdicts, write_experiment, AuditSummary, Cell, CellStatus, ExperimentOutput,
    InstanceSource, InstanceSummary, Manifest, RunRecord, SummaryRow, Timings, Verdict,
};
pub use generate::{gen_random, GenParams};
pub use io::{
    canonical_json, instance_to_json, load_instance, parse_instance, save_solution, DemandRecord, EdgeRecord,
    InstanceFile,
};

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}: {source}")]
    Invalid {
        context: String,
        #[source]
        source: GraphError,
    },
    #[error("no instance found after {attempts} attempts for n = {n}, density = {density}, q = {q}, k = {k}")]
    Generation {
        n: usize,
        density: f64,
        q: usize,
        k: u32,
        attempts: usize,
    },
    #[error("invalid generator parameters: {0}")]
    Params(String),
}

/// Round to 9 significant digits; idempotent, so canonical output round-trips.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.8e}").parse().expect("formatted float parses")
}
