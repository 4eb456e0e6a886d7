//! The level-by-level augmentation solver.
//!
//! Level `ℓ` starts from a subgraph in which every demand is `ℓ`-connected,
//! solves the augmentation LP with the bought edges free, buys every LARGE
//! edge, and then repeatedly samples trees and appends tree-rounding output
//! until every demand is `(ℓ+1)`-connected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{build_distribution, fix_point_beta, initial_beta, BetaFixPoint, EmbeddingConfig};
use crate::gkr::RoundingError;
use crate::graph::{
    max_flow, normalize, reduce_to_uniform, CapacityMap, CutCertificate, EdgeId, GraphError, Instance,
};
use crate::lp::{build_augmentation_lp, solve_fractional, FractionalSolution, LpError, LP_TOLERANCE};
use crate::rounding::{default_tau_prime, tree_rounding, TreeRoundingConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("level {level}: demand {demand} is not {level}-connected in the starting subgraph")]
    Precondition { level: usize, demand: usize },
    #[error("level {level}: {source}")]
    Lp {
        level: usize,
        #[source]
        source: LpError,
    },
    #[error("level {level}: demand {demand} still below {requirement} after {restarts} restarts (cut capacity {})", cut.capacity)]
    RestartsExhausted {
        level: usize,
        demand: usize,
        requirement: usize,
        restarts: usize,
        cut: CutCertificate,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error("invalid driver configuration: {0}")]
    Config(String),
}

/// Solver parameters. Unset counts fall back to their formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriverConfig {
    /// Outer tree samples per attempt; default `ceil(3(ℓ+1) ln n) + 3`.
    pub tau1: Option<usize>,
    /// Roundings per sampled tree; default from `phi_hat`, see [`default_tau2`].
    pub tau2: Option<usize>,
    /// Rounding repetitions per marked node; default `ceil(4 ln n) + 4`.
    pub tau_prime: Option<usize>,
    pub phi_hat: f64,
    /// Starting β of the fix-point iteration; default `max(1, ceil(log2 n))`.
    pub beta0: Option<f64>,
    pub max_beta_iters: usize,
    pub num_trees: Option<usize>,
    pub eps_mwu: f64,
    pub height_factor: f64,
    pub exact_partition_limit: usize,
    pub seed: u64,
    pub las_vegas: bool,
    pub max_restarts: usize,
    pub lp_tolerance: f64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        let emb = EmbeddingConfig::default();
        DriverConfig {
            tau1: None,
            tau2: None,
            tau_prime: None,
            phi_hat: 0.1,
            beta0: None,
            max_beta_iters: 5,
            num_trees: emb.num_trees,
            eps_mwu: emb.eps_mwu,
            height_factor: emb.height_factor,
            exact_partition_limit: emb.exact_partition_limit,
            seed: 0,
            las_vegas: true,
            max_restarts: 5,
            lp_tolerance: LP_TOLERANCE,
        }
    }
}

impl DriverConfig {
    pub fn embedding(&self) -> EmbeddingConfig {
        EmbeddingConfig {
            num_trees: self.num_trees,
            eps_mwu: self.eps_mwu,
            height_factor: self.height_factor,
            exact_partition_limit: self.exact_partition_limit,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = |name: &str, v: Option<usize>| match v {
            Some(0) => Err(SolveError::Config(format!("{name} must be at least 1"))),
            _ => Ok(()),
        };
        positive("tau1", self.tau1)?;
        positive("tau2", self.tau2)?;
        positive("tau_prime", self.tau_prime)?;
        positive("num_trees", self.num_trees)?;
        if self.max_beta_iters == 0 {
            return Err(SolveError::Config("max_beta_iters must be at least 1".into()));
        }
        if !(self.phi_hat > 0.0 && self.phi_hat <= 1.0) {
            return Err(SolveError::Config(format!("phi_hat = {} is outside (0, 1]", self.phi_hat)));
        }
        if !(self.eps_mwu.is_finite() && self.eps_mwu >= 0.0) {
            return Err(SolveError::Config("eps_mwu must be finite and nonnegative".into()));
        }
        if !(self.lp_tolerance.is_finite() && self.lp_tolerance > 0.0) {
            return Err(SolveError::Config("lp_tolerance must be positive".into()));
        }
        if let Some(b) = self.beta0 {
            if !(b.is_finite() && b >= 1.0) {
                return Err(SolveError::Config("beta0 must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// `ceil(3 (ℓ+1) ln n) + 3`.
pub fn default_tau1(level: usize, n: usize) -> usize {
    (3.0 * (level + 1) as f64 * (n.max(2) as f64).ln()).ceil() as usize + 3
}

/// `ceil((1/φ̂)(ln max(q,2) + 2ℓ ln n + 2ℓβ ln 2 + ln 4))`.
pub fn default_tau2(level: usize, n: usize, q: usize, beta: f64, phi_hat: f64) -> usize {
    let l = level as f64;
    let inner = (q.max(2) as f64).ln() + 2.0 * l * (n.max(2) as f64).ln() + 2.0 * l * beta * 2f64.ln() + 4f64.ln();
    ((inner / phi_hat).ceil() as usize).max(1)
}

/// Metrics of one augmentation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub lp_value: f64,
    pub beta: f64,
    pub beta_measured: f64,
    pub beta_converged: bool,
    pub beta_iterations: usize,
    pub large_count: usize,
    pub trees_sampled: usize,
    pub roundings_used: usize,
    pub restarts: usize,
    /// True when some attempt ran through all `τ₁ · τ₂` roundings without success.
    pub caps_exhausted: bool,
    pub cost_large: f64,
    pub cost_rounding: f64,
    pub cost_added: f64,
    pub connected: bool,
}

/// Bought edges after some number of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSolution {
    pub level: usize,
    pub bought: Vec<EdgeId>,
    pub cost: f64,
    pub levels: Vec<LevelReport>,
}

impl PartialSolution {
    pub fn empty() -> Self {
        PartialSolution {
            level: 0,
            bought: Vec::new(),
            cost: 0.0,
            levels: Vec::new(),
        }
    }

    /// Start at level 0 with `edges` already bought.
    pub fn with_bought(instance: &Instance, edges: &[EdgeId]) -> Self {
        let bought = normalize(edges.to_vec());
        PartialSolution {
            cost: instance.cost_of(&bought),
            bought,
            ..PartialSolution::empty()
        }
    }
}

fn merge(into: &mut Vec<EdgeId>, add: &[EdgeId]) {
    into.extend_from_slice(add);
    into.sort_unstable();
    into.dedup();
}

fn deficiency_report(instance: &Instance, h: &[EdgeId], demand: usize) -> Result<CutCertificate, GraphError> {
    let d = &instance.demands()[demand];
    let caps = CapacityMap::indicator(instance.edges().len(), h);
    Ok(max_flow(instance, &caps, d.sources(), d.sinks())?.cut)
}

/// LP solution, β fix-point and LARGE purchase of one level, before rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetup {
    pub level: usize,
    pub x: FractionalSolution,
    pub fix_point: BetaFixPoint,
    /// Bought edges plus every LARGE edge.
    pub h: Vec<EdgeId>,
    pub cost_large: f64,
}

/// Steps up to the LARGE purchase: solve the LP with bought edges free, run
/// the β fix-point (capping and tree distribution), and buy LARGE edges.
pub fn prepare_level<R: Rng + ?Sized>(
    instance: &Instance,
    partial: &PartialSolution,
    config: &DriverConfig,
    rng: &mut R,
) -> Result<LevelSetup, SolveError> {
    config.validate()?;
    let level = partial.level;
    if let Some(demand) = instance.first_deficient(&partial.bought, level) {
        return Err(SolveError::Precondition { level, demand });
    }
    let lp = build_augmentation_lp(instance, &partial.bought, level);
    let x = solve_fractional(&lp, config.lp_tolerance).map_err(|source| SolveError::Lp { level, source })?;
    let beta0 = config.beta0.unwrap_or_else(|| initial_beta(instance.n()));
    let fix_point = fix_point_beta(instance, &x, level, beta0, &config.embedding(), config.max_beta_iters, rng)?;
    let mut h = partial.bought.clone();
    merge(&mut h, &fix_point.capped.large);
    let cost_large = instance.cost_of(&h) - partial.cost;
    Ok(LevelSetup {
        level,
        x,
        fix_point,
        h,
        cost_large,
    })
}

/// Raise every demand from `ℓ`- to `(ℓ+1)`-connectivity.
pub fn augment_one_level<R: Rng + ?Sized>(
    instance: &Instance,
    partial: &PartialSolution,
    config: &DriverConfig,
    rng: &mut R,
) -> Result<PartialSolution, SolveError> {
    let setup = prepare_level(instance, partial, config, rng)?;
    let level = partial.level;
    let target = level + 1;
    let n = instance.n();
    let emb = config.embedding();
    let LevelSetup {
        x,
        fix_point: fp,
        mut h,
        cost_large,
        ..
    } = setup;

    let mut report = LevelReport {
        level,
        lp_value: x.objective,
        beta: fp.beta,
        beta_measured: fp.beta_measured,
        beta_converged: fp.converged,
        beta_iterations: fp.iterations,
        large_count: fp.capped.large.len(),
        trees_sampled: 0,
        roundings_used: 0,
        restarts: 0,
        caps_exhausted: false,
        cost_large,
        cost_rounding: 0.0,
        cost_added: 0.0,
        connected: instance.first_deficient(&h, target).is_none(),
    };

    if !report.connected {
        let tau1 = config.tau1.unwrap_or_else(|| default_tau1(level, n));
        let tau2 = config
            .tau2
            .unwrap_or_else(|| default_tau2(level, n, instance.demands().len(), fp.beta, config.phi_hat));
        let mut rcfg = TreeRoundingConfig::for_graph(n, fp.capped.threshold);
        rcfg.tau_prime = config.tau_prime.unwrap_or_else(|| default_tau_prime(n));
        let attempts = if config.las_vegas { config.max_restarts + 1 } else { 1 };
        let mut dist = fp.distribution;
        'attempts: for attempt in 0..attempts {
            if attempt > 0 {
                report.restarts += 1;
                let mut fresh = ChaCha8Rng::seed_from_u64(rng.gen());
                dist = build_distribution(instance, &fp.capped.capacities, &emb, &mut fresh)?;
            }
            for _ in 0..tau1 {
                let tree = dist.sample(rng);
                report.trees_sampled += 1;
                for _ in 0..tau2 {
                    let out = tree_rounding(tree, &rcfg, rng)?;
                    report.roundings_used += 1;
                    merge(&mut h, &out.edges);
                    if config.las_vegas && instance.first_deficient(&h, target).is_none() {
                        report.connected = true;
                        break 'attempts;
                    }
                }
            }
            report.caps_exhausted = true;
            if !config.las_vegas {
                report.connected = instance.first_deficient(&h, target).is_none();
            }
        }
        if config.las_vegas && !report.connected {
            let demand = instance.first_deficient(&h, target).expect("a demand is still deficient");
            return Err(SolveError::RestartsExhausted {
                level,
                demand,
                requirement: target,
                restarts: report.restarts,
                cut: deficiency_report(instance, &h, demand)?,
            });
        }
    }

    let cost = instance.cost_of(&h);
    report.cost_added = cost - partial.cost;
    report.cost_rounding = report.cost_added - report.cost_large;
    let mut levels = partial.levels.clone();
    levels.push(report);
    Ok(PartialSolution {
        level: target,
        bought: h,
        cost,
        levels,
    })
}

/// Summary of a full solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub requirement: usize,
    /// Whether mixed requirements were lifted to a uniform instance first.
    pub reduced: bool,
    pub levels: Vec<LevelReport>,
    pub cost: f64,
    /// `max_ℓ` of the level LP values.
    pub lower_bound: f64,
    /// `cost / lower_bound`, absent when the bound is 0.
    pub ratio: Option<f64>,
    /// Sum of level LP values, reported against `k` times the level-0 value.
    pub lp_sum: f64,
    pub feasible: bool,
    pub caps_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub edges: Vec<EdgeId>,
    pub cost: f64,
    pub report: RunReport,
}

/// Solve an instance level by level from an empty subgraph.
///
/// Mixed requirements are first lifted to a uniform instance with zero-cost
/// auxiliary edges; those edges start out bought and are dropped from the
/// returned solution. Feasibility of the result is verified against the
/// original requirements.
pub fn solve(instance: &Instance, config: &DriverConfig) -> Result<Solution, SolveError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let reduction = (!instance.has_uniform_requirements()).then(|| reduce_to_uniform(instance));
    let work = reduction.as_ref().map_or(instance, |r| &r.instance);
    let k = work.max_requirement() as usize;
    let mut partial = match &reduction {
        Some(r) => PartialSolution::with_bought(work, &r.auxiliary_edges),
        None => PartialSolution::empty(),
    };
    for _ in 0..k {
        partial = augment_one_level(work, &partial, config, &mut rng)?;
    }
    let edges = match &reduction {
        Some(r) => r.restrict(&partial.bought),
        None => partial.bought.clone(),
    };
    let cost = instance.cost_of(&edges);
    let lower_bound = partial.levels.iter().map(|l| l.lp_value).fold(0.0, f64::max);
    let report = RunReport {
        seed: config.seed,
        requirement: k,
        reduced: reduction.is_some(),
        cost,
        lower_bound,
        ratio: (lower_bound > 0.0).then(|| cost / lower_bound),
        lp_sum: partial.levels.iter().map(|l| l.lp_value).sum(),
        feasible: instance.is_feasible(&edges),
        caps_exhausted: partial.levels.iter().any(|l| l.caps_exhausted),
        levels: partial.levels,
    };
    Ok(Solution { edges, cost, report })
}
