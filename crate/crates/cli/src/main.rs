use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gsndp_core::diagnostics::{audit_csv, audit_instance, AuditConfig};
use gsndp_core::driver::{prepare_level, solve, DriverConfig, PartialSolution};
use gsndp_core::embedding::{rload_csv, to_dot};
use gsndp_core::graph::{reduce_to_uniform, EdgeId, Instance};
use gsndp_core::harness::{
    canonical_json, gen_random, instance_to_json, load_instance, run_experiment, save_solution, verdicts,
    write_experiment, AuditSummary, GenParams, Manifest,
};
use gsndp_core::lp::{build_augmentation_lp, solve_fractional, to_lp_format, verify_lp_feasibility};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "gsndp", version, about = "Group edge-connectivity network design solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the LP feasibility tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Directory for written artifacts.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Solver configuration (JSON, same schema as the library's DriverConfig).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve and verify the level LP.
    Lp {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Also write the LP in text format to this file under --out-dir.
        #[arg(long)]
        dump: Option<String>,
    },
    /// Build the level-0 tree distribution; writes tree.dot and rload.csv.
    Embed { instance: PathBuf },
    /// Solve an instance; writes solution.json.
    Solve { instance: PathBuf },
    /// Check a solution file against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Run the per-level structural audits.
    Diagnose { instance: PathBuf },
    /// Run an experiment manifest.
    Bench { manifest: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, default_value_t = 1.0)]
    cost_min: f64,
    #[arg(long, default_value_t = 10.0)]
    cost_max: f64,
    #[arg(long, default_value_t = 2)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    mixed: bool,
    #[arg(long, default_value_t = 1)]
    side_min: usize,
    #[arg(long, default_value_t = 2)]
    side_max: usize,
    #[arg(long)]
    max_edges: Option<usize>,
    /// File name under --out-dir; stdout when absent.
    #[arg(long, short)]
    output: Option<String>,
}

fn config(global: &Global) -> Result<DriverConfig> {
    let mut cfg = match &global.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => DriverConfig::default(),
    };
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(t) = global.tolerance {
        cfg.lp_tolerance = t;
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn uniform(instance: Instance) -> Instance {
    if instance.has_uniform_requirements() {
        instance
    } else {
        reduce_to_uniform(&instance).instance
    }
}

fn print(value: &serde_json::Value) -> Result<()> {
    print!("{}", canonical_json(value)?);
    Ok(())
}

fn read_solution(path: &Path) -> Result<Vec<EdgeId>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let edges = v.get("edges").unwrap_or(&v);
    serde_json::from_value(edges.clone()).with_context(|| format!("{}: expected an edge id list", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.command {
        Command::Gen(a) => {
            let params = GenParams {
                n: a.n,
                density: a.density,
                cost_min: a.cost_min,
                cost_max: a.cost_max,
                q: a.q,
                k: a.k,
                mixed: a.mixed,
                side_min: a.side_min,
                side_max: a.side_max,
                max_edges: a.max_edges,
                ..GenParams::default()
            };
            let inst = gen_random(&params, g.seed.unwrap_or(0))?;
            let text = instance_to_json(&inst);
            match a.output {
                Some(name) => {
                    let p = write(&g.out_dir, &name, &text)?;
                    eprintln!("wrote {}", p.display());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Lp { instance, level, dump } => {
            let cfg = config(g)?;
            let inst = uniform(load_instance(&instance)?);
            let lp = build_augmentation_lp(&inst, &[], level);
            if let Some(name) = dump {
                write(&g.out_dir, &name, &to_lp_format(&lp.to_linear_program()))?;
            }
            let sol = solve_fractional(&lp, cfg.lp_tolerance)?;
            let report = verify_lp_feasibility(&inst, &sol.x, level + 1, cfg.lp_tolerance)?;
            print(&json!({"objective": sol.objective, "x": sol.x, "verified": report.ok()}))?;
            Ok(report.ok())
        }
        Command::Embed { instance } => {
            let cfg = config(g)?;
            let inst = uniform(load_instance(&instance)?);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let setup = prepare_level(&inst, &PartialSolution::empty(), &cfg, &mut rng)?;
            let fp = &setup.fix_point;
            let dist = &fp.distribution;
            let heaviest = (0..dist.trees.len())
                .max_by(|&a, &b| dist.probabilities[a].total_cmp(&dist.probabilities[b]))
                .context("empty tree distribution")?;
            write(&g.out_dir, "tree.dot", &to_dot(&dist.trees[heaviest]))?;
            write(&g.out_dir, "rload.csv", &rload_csv(&dist.congestion, fp.capped.capacities.as_slice()))?;
            print(&json!({
                "beta": fp.beta,
                "beta_measured": fp.beta_measured,
                "converged": fp.converged,
                "iterations": fp.iterations,
                "trees": dist.trees.len(),
                "heights": dist.trees.iter().map(|t| t.height()).collect::<Vec<_>>(),
                "large": fp.capped.large,
            }))?;
            Ok(true)
        }
        Command::Solve { instance } => {
            let cfg = config(g)?;
            let inst = load_instance(&instance)?;
            let sol = solve(&inst, &cfg)?;
            let v = verdicts(&inst, &sol.edges);
            let ok = v.iter().all(|v| v.pass);
            fs::create_dir_all(&g.out_dir)?;
            let path = g.out_dir.join("solution.json");
            save_solution(&path, &sol.edges, sol.cost, &json!({"config": cfg, "report": sol.report, "verdicts": v}))?;
            eprintln!("wrote {}", path.display());
            print(&json!({
                "cost": sol.cost,
                "edges": sol.edges,
                "lower_bound": sol.report.lower_bound,
                "ratio": sol.report.ratio,
                "feasible": ok,
            }))?;
            Ok(ok)
        }
        Command::Verify { instance, solution } => {
            let inst = load_instance(&instance)?;
            let edges = read_solution(&solution)?;
            if let Some(&e) = edges.iter().find(|&&e| e >= inst.edges().len()) {
                bail!("{}: edge id {e} out of range", solution.display());
            }
            let v = verdicts(&inst, &edges);
            let ok = v.iter().all(|v| v.pass);
            print(&json!({"cost": inst.cost_of(&edges), "feasible": ok, "verdicts": v}))?;
            Ok(ok)
        }
        Command::Diagnose { instance } => {
            let cfg = config(g)?;
            let inst = load_instance(&instance)?;
            let audits = audit_instance(&inst, &cfg, &AuditConfig::default())?;
            for a in &audits {
                write(&g.out_dir, &format!("audit_level{}.csv", a.level), &audit_csv(a))?;
            }
            let summary: Vec<AuditSummary> = audits.iter().map(AuditSummary::from).collect();
            write(&g.out_dir, "audit.json", &canonical_json(&summary)?)?;
            print(&serde_json::to_value(&summary)?)?;
            Ok(audits.iter().all(|a| a.all_pass()))
        }
        Command::Bench { manifest } => {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let m: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest.display()))?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let out = run_experiment(&m, base);
            write_experiment(&out, &g.out_dir)?;
            let failed = out.records.iter().filter(|r| !r.feasible()).count();
            eprintln!("{} runs, {failed} failed, outputs in {}", out.records.len(), g.out_dir.display());
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
