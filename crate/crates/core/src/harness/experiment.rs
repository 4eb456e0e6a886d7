use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svg::{scatter, Series};
use super::{canonical_json, gen_random, load_instance, round_sig, GenParams, HarnessError};
use crate::diagnostics::{audit_instance, AuditConfig, LevelAudit, Tally};
use crate::driver::{solve, DriverConfig, RunReport};
use crate::graph::{set_pair_edge_connectivity, Connectivity, EdgeId, Instance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    /// Instance file, relative to the manifest's directory.
    Path(String),
    Generate { params: GenParams, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub name: String,
    pub instance: InstanceSource,
    #[serde(default)]
    pub config: DriverConfig,
    pub seeds: Vec<u64>,
    /// Also run the level audits (tiny instances only).
    #[serde(default)]
    pub diagnostics: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub cells: Vec<Cell>,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed { message: String },
}

/// Per-demand feasibility of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub demand: usize,
    pub requirement: u32,
    /// `None` when the sides intersect.
    pub connectivity: Option<usize>,
    pub pass: bool,
}

/// Wall-clock measurements; the only nondeterministic part of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub solve_ms: f64,
    pub diagnostics_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub k: u32,
    pub mixed: bool,
}

/// Everything needed to reproduce and check one `(cell, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: String,
    pub seed: u64,
    pub config: DriverConfig,
    pub instance: Option<InstanceSummary>,
    pub status: CellStatus,
    pub solution: Option<Vec<EdgeId>>,
    pub report: Option<RunReport>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Option<Vec<AuditSummary>>,
    pub timings: Option<Timings>,
}

impl RunRecord {
    pub fn feasible(&self) -> bool {
        self.status == CellStatus::Ok && self.verdicts.iter().all(|v| v.pass)
    }

    /// The record without its timing field, for byte comparisons.
    pub fn without_timings(&self) -> RunRecord {
        RunRecord {
            timings: None,
            ..self.clone()
        }
    }
}

/// A level audit without its per-scenario rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub level: usize,
    pub beta: f64,
    pub beta_measured: f64,
    pub converged: bool,
    pub sampled: bool,
    pub failure_sets: usize,
    pub good_scenarios: usize,
    pub min_good_frequency: f64,
    pub shattered: Tally,
    pub flow: Tally,
    pub intact: Tally,
    pub reduction: Tally,
    pub connection_frequency: Option<f64>,
    pub counterexamples: Vec<String>,
}

impl From<&LevelAudit> for AuditSummary {
    fn from(a: &LevelAudit) -> Self {
        AuditSummary {
            level: a.level,
            beta: a.beta,
            beta_measured: a.beta_measured,
            converged: a.converged,
            sampled: a.sampled,
            failure_sets: a.failure_sets,
            good_scenarios: a.good_scenarios,
            min_good_frequency: a.min_good_frequency,
            shattered: a.shattered,
            flow: a.flow,
            intact: a.intact,
            reduction: a.reduction,
            connection_frequency: a.connection_frequency,
            counterexamples: a.counterexamples.clone(),
        }
    }
}

/// Records plus rendered tables and plots, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub files: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn all_feasible(&self) -> bool {
        self.records.iter().all(RunRecord::feasible)
    }
}

/// Verdict per demand against its own requirement.
pub fn verdicts(instance: &Instance, edges: &[EdgeId]) -> Vec<Verdict> {
    instance
        .demands()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let c = set_pair_edge_connectivity(instance, edges, d.sources(), d.sinks()).expect("valid edge ids");
            let connectivity = match c {
                Connectivity::Finite(c) => Some(c),
                Connectivity::Unbounded => None,
            };
            Verdict {
                demand: i,
                requirement: d.requirement(),
                connectivity,
                pass: c.at_least(d.requirement() as usize),
            }
        })
        .collect()
}

fn resolve(source: &InstanceSource, base: &Path) -> Result<Instance, HarnessError> {
    match source {
        InstanceSource::Path(p) => {
            let path = PathBuf::from(p);
            load_instance(if path.is_absolute() { path } else { base.join(path) })
        }
        InstanceSource::Generate { params, seed } => gen_random(params, *seed),
    }
}

fn run_cell(cell: &Cell, seed: u64, base: &Path) -> RunRecord {
    let mut config = cell.config.clone();
    config.seed = seed;
    let mut record = RunRecord {
        cell: cell.name.clone(),
        seed,
        config: config.clone(),
        instance: None,
        status: CellStatus::Ok,
        solution: None,
        report: None,
        verdicts: Vec::new(),
        diagnostics: None,
        timings: None,
    };
    let instance = match resolve(&cell.instance, base) {
        Ok(i) => i,
        Err(e) => {
            record.status = CellStatus::Failed { message: e.to_string() };
            return record;
        }
    };
    record.instance = Some(InstanceSummary {
        n: instance.n(),
        m: instance.edges().len(),
        q: instance.demands().len(),
        k: instance.max_requirement(),
        mixed: !instance.has_uniform_requirements(),
    });
    let start = Instant::now();
    match solve(&instance, &config) {
        Ok(sol) => {
            record.verdicts = verdicts(&instance, &sol.edges);
            record.solution = Some(sol.edges);
            record.report = Some(sol.report);
        }
        Err(e) => record.status = CellStatus::Failed { message: e.to_string() },
    }
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    if cell.diagnostics && record.status == CellStatus::Ok {
        match audit_instance(&instance, &config, &AuditConfig::default()) {
            Ok(levels) => record.diagnostics = Some(levels.iter().map(AuditSummary::from).collect()),
            Err(e) => record.status = CellStatus::Failed { message: format!("diagnostics: {e}") },
        }
    }
    record.timings = Some(Timings {
        solve_ms,
        diagnostics_ms: start.elapsed().as_secs_f64() * 1e3,
    });
    record
}

/// Run every `(cell, seed)` pair; failures are recorded and the run continues.
///
/// `base` resolves relative instance paths.
pub fn run_experiment(manifest: &Manifest, base: &Path) -> ExperimentOutput {
    let jobs: Vec<(&Cell, u64)> = manifest
        .cells
        .iter()
        .flat_map(|c| c.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let work = || jobs.par_iter().map(|&(c, s)| run_cell(c, s, base)).collect::<Vec<_>>();
    let records = match manifest.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map(|pool| pool.install(work))
            .unwrap_or_else(|_| work()),
        None => work(),
    };
    let files = render(&records);
    ExperimentOutput { records, files }
}

fn mean_stdev(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

fn num(v: f64) -> String {
    if v.is_finite() {
        round_sig(v).to_string()
    } else {
        String::new()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn beta_max(r: &RunRecord) -> Option<f64> {
    r.report
        .as_ref()
        .map(|rep| rep.levels.iter().map(|l| l.beta_measured).fold(0.0, f64::max))
}

/// Aggregates of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: String,
    pub n: Option<usize>,
    pub k: Option<u32>,
    pub q: Option<usize>,
    pub runs: usize,
    pub failures: usize,
    pub cost_mean: f64,
    pub cost_stdev: f64,
    pub ratio_mean: f64,
    pub ratio_stdev: f64,
    pub beta_mean: f64,
    pub beta_stdev: f64,
}

/// Per-cell mean and sample standard deviation, cells in first-seen order.
pub fn summary_rows(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.cell.as_str()) {
            names.push(&r.cell);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.cell == name).collect();
            let ok: Vec<&&RunRecord> = rs.iter().filter(|r| r.feasible()).collect();
            let costs: Vec<f64> = ok.iter().filter_map(|r| r.report.as_ref().map(|p| p.cost)).collect();
            let ratios: Vec<f64> = ok.iter().filter_map(|r| r.report.as_ref().and_then(|p| p.ratio)).collect();
            let betas: Vec<f64> = ok.iter().filter_map(|r| beta_max(r)).collect();
            let (cost_mean, cost_stdev) = mean_stdev(&costs);
            let (ratio_mean, ratio_stdev) = mean_stdev(&ratios);
            let (beta_mean, beta_stdev) = mean_stdev(&betas);
            let inst = rs.iter().find_map(|r| r.instance.as_ref());
            SummaryRow {
                cell: name.to_string(),
                n: inst.map(|i| i.n),
                k: inst.map(|i| i.k),
                q: inst.map(|i| i.q),
                runs: rs.len(),
                failures: rs.len() - ok.len(),
                cost_mean,
                cost_stdev,
                ratio_mean,
                ratio_stdev,
                beta_mean,
                beta_stdev,
            }
        })
        .collect()
}

fn render(records: &[RunRecord]) -> Vec<(String, String)> {
    let mut runs = String::from("cell,seed,n,m,q,k,status,feasible,cost,lower_bound,ratio,beta_max,roundings,restarts\n");
    let mut beta = String::from("cell,seed,level,lp_value,beta,beta_measured,converged,large_count,trees_sampled,roundings_used\n");
    let mut diag = String::from(
        "cell,seed,level,converged,sampled,failure_sets,good_scenarios,min_good_frequency,shattered_fail,flow_fail,intact_fail,reduction_fail,connection_frequency\n",
    );
    for r in records {
        let inst = r.instance.as_ref();
        let field = |f: &dyn Fn(&InstanceSummary) -> String| inst.map(f).unwrap_or_default();
        let rep = r.report.as_ref();
        let _ = writeln!(
            runs,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.seed,
            field(&|i| i.n.to_string()),
            field(&|i| i.m.to_string()),
            field(&|i| i.q.to_string()),
            field(&|i| i.k.to_string()),
            match r.status {
                CellStatus::Ok => "ok",
                CellStatus::Failed { .. } => "failed",
            },
            r.feasible(),
            opt(rep.map(|p| p.cost)),
            opt(rep.map(|p| p.lower_bound)),
            opt(rep.and_then(|p| p.ratio)),
            opt(beta_max(r)),
            rep.map(|p| p.levels.iter().map(|l| l.roundings_used).sum::<usize>().to_string()).unwrap_or_default(),
            rep.map(|p| p.levels.iter().map(|l| l.restarts).sum::<usize>().to_string()).unwrap_or_default(),
        );
        for l in rep.map(|p| p.levels.as_slice()).unwrap_or_default() {
            let _ = writeln!(
                beta,
                "{},{},{},{},{},{},{},{},{},{}",
                r.cell,
                r.seed,
                l.level,
                num(l.lp_value),
                num(l.beta),
                num(l.beta_measured),
                l.beta_converged,
                l.large_count,
                l.trees_sampled,
                l.roundings_used
            );
        }
        for a in r.diagnostics.as_deref().unwrap_or_default() {
            let _ = writeln!(
                diag,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.cell,
                r.seed,
                a.level,
                a.converged,
                a.sampled,
                a.failure_sets,
                a.good_scenarios,
                num(a.min_good_frequency),
                a.shattered.failed,
                a.flow.failed,
                a.intact.failed,
                a.reduction.failed,
                opt(a.connection_frequency)
            );
        }
    }
    let mut summary = String::from(
        "cell,n,k,q,runs,failures,cost_mean,cost_stdev,ratio_mean,ratio_stdev,beta_mean,beta_stdev\n",
    );
    let rows = summary_rows(records);
    for s in &rows {
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.cell,
            s.n.map(|v| v.to_string()).unwrap_or_default(),
            s.k.map(|v| v.to_string()).unwrap_or_default(),
            s.q.map(|v| v.to_string()).unwrap_or_default(),
            s.runs,
            s.failures,
            num(s.cost_mean),
            num(s.cost_stdev),
            num(s.ratio_mean),
            num(s.ratio_stdev),
            num(s.beta_mean),
            num(s.beta_stdev)
        );
    }
    let mut by_k: Vec<Series> = Vec::new();
    let mut beta_series: Vec<Series> = Vec::new();
    for r in records.iter().filter(|r| r.feasible()) {
        let (Some(inst), Some(rep)) = (&r.instance, &r.report) else { continue };
        let name = format!("k = {}", inst.k);
        let idx = by_k.iter().position(|s| s.name == name).unwrap_or_else(|| {
            by_k.push(Series {
                name: name.clone(),
                points: Vec::new(),
            });
            beta_series.push(Series {
                name,
                points: Vec::new(),
            });
            by_k.len() - 1
        });
        if let Some(ratio) = rep.ratio {
            by_k[idx].points.push((inst.n as f64, ratio));
        }
        if let Some(b) = beta_max(r) {
            beta_series[idx].points.push((inst.n as f64, b));
        }
    }
    vec![
        ("runs.csv".into(), runs),
        ("summary.csv".into(), summary),
        ("levels.csv".into(), beta),
        ("diagnostics.csv".into(), diag),
        ("ratio_vs_n.svg".into(), scatter("cost / LP lower bound", "n", "ratio", &by_k)),
        ("beta_vs_n.svg".into(), scatter("measured congestion", "n", "max level beta", &beta_series)),
    ]
}

/// Write `records.json` plus every table and plot into `dir`.
pub fn write_experiment(output: &ExperimentOutput, dir: &Path) -> Result<(), HarnessError> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| HarnessError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let records = dir.join("records.json");
    std::fs::write(&records, canonical_json(&output.records)?).map_err(io(&records))?;
    for (name, content) in &output.files {
        let p = dir.join(name);
        std::fs::write(&p, content).map_err(io(&p))?;
    }
    Ok(())
}
