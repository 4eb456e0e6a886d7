//! Brute-force audits of the structural analysis on tiny instances.
//!
//! For a failure set `F ⊆ E(H)` with `|F| = ℓ`, the components of `H ∖ F`
//! are classified against a tree: a component is *shattered* when its leaves
//! fall apart once the preimage `M⁻¹(F)` is deleted from the tree, and a tree
//! is *good* for `F` when `y(M⁻¹(F)) ≤ 1/2`. From the shattered components
//! and the demands the tree-demand-pairs `Z_F` are enumerated, and the flow,
//! count, cut and reduction bounds are checked one scenario at a time.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driver::{augment_one_level, prepare_level, DriverConfig, PartialSolution, SolveError};
use crate::embedding::{capping_threshold, CappedCapacities, TreeDistribution, TreeEdgeId, TreeEmbedding};
use crate::gkr::RoundingError;
use crate::graph::{
    connected_components, max_flow, reduce_to_uniform, CapacityMap, DemandPair, EdgeId, GraphError, Instance, VertexId,
};
use crate::harness::round_sig;
use crate::rounding::{connects_in_tree, tree_rounding, TreeRoundingConfig};

/// Default limit on shattered components for `Z_F` enumeration.
pub const SHATTERED_CAP: usize = 14;
/// Default limit on the number of failure sets enumerated exhaustively.
pub const F_SWEEP_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("{count} shattered components exceed the enumeration cap of {cap}")]
    TooManyShattered { count: usize, cap: usize },
    #[error("failure edge {0} is not in H")]
    NotInH(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

/// Components of `H ∖ F` classified against one tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutScenario {
    pub failed: Vec<EdgeId>,
    pub components: Vec<Vec<VertexId>>,
    pub component_of: Vec<usize>,
    pub shattered: Vec<bool>,
    pub preimage: Vec<TreeEdgeId>,
    /// `y(M⁻¹(F))`.
    pub load: f64,
    pub good: bool,
    /// Per demand, indices of components meeting `S_i` (resp. `T_i`).
    pub q_s: Vec<Vec<usize>>,
    pub q_t: Vec<Vec<usize>>,
}

impl CutScenario {
    pub fn shattered_count(&self) -> usize {
        self.shattered.iter().filter(|&&s| s).count()
    }

    fn vertices(&self, comps: impl IntoIterator<Item = usize>) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = comps.into_iter().flat_map(|c| self.components[c].iter().copied()).collect();
        out.sort_unstable();
        out
    }
}

/// Union-find classes of tree nodes after deleting `removed` tree edges.
fn residual_classes(tree: &TreeEmbedding, removed: &[TreeEdgeId]) -> Vec<usize> {
    let mut gone = vec![false; tree.tree_edges().len()];
    for &f in removed {
        gone[f] = true;
    }
    let mut class: Vec<usize> = vec![usize::MAX; tree.nodes().len()];
    let mut next = 0;
    for s in 0..tree.nodes().len() {
        if class[s] != usize::MAX {
            continue;
        }
        class[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let node = tree.node(v);
            let up = node.parent_edge.map(|f| (f, tree.tree_edge(f).parent));
            let down = node.children.iter().map(|&f| (f, tree.tree_edge(f).child));
            for (f, w) in up.into_iter().chain(down) {
                if !gone[f] && class[w] == usize::MAX {
                    class[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    class
}

/// Classify the components of `H ∖ F` against `tree`.
pub fn analyze_cut(
    instance: &Instance,
    h: &[EdgeId],
    failed: &[EdgeId],
    tree: &TreeEmbedding,
) -> Result<CutScenario, DiagnosticsError> {
    if let Some(&e) = failed.iter().find(|e| !h.contains(e)) {
        return Err(DiagnosticsError::NotInH(e));
    }
    let remaining: Vec<EdgeId> = h.iter().copied().filter(|e| !failed.contains(e)).collect();
    let components = connected_components(instance, &remaining);
    let mut component_of = vec![0; instance.n()];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let preimage = tree.preimage(failed);
    let load: f64 = preimage.iter().map(|&f| tree.tree_edge(f).capacity).sum();
    let class = residual_classes(tree, &preimage);
    let shattered = components
        .iter()
        .map(|comp| {
            let first = class[tree.leaf(comp[0])];
            comp.iter().any(|&v| class[tree.leaf(v)] != first)
        })
        .collect();
    let closure = |side: &[VertexId]| {
        let mut c: Vec<usize> = side.iter().map(|&v| component_of[v]).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let q_s = instance.demands().iter().map(|d| closure(d.sources())).collect();
    let q_t = instance.demands().iter().map(|d| closure(d.sinks())).collect();
    Ok(CutScenario {
        failed: failed.to_vec(),
        components,
        component_of,
        shattered,
        preimage,
        load,
        good: load <= 0.5,
        q_s,
        q_t,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDemandPair {
    pub demand: usize,
    /// Vertices of `A′ ∪ Q_{S_i}`.
    pub a: Vec<VertexId>,
    /// Vertices of `B′ ∪ Q_{T_i}`.
    pub b: Vec<VertexId>,
    /// Component indices of `A′` and `B′`.
    pub a_prime: Vec<usize>,
    pub b_prime: Vec<usize>,
}

/// `Z_F`: every split of the shattered components crossed with each demand
/// whose closures are disjoint. Shattered components already inside
/// `Q_{S_i} ∪ Q_{T_i}` stay on their side.
pub fn enumerate_tree_demand_pairs(
    scenario: &CutScenario,
    demands: &[DemandPair],
    cap: usize,
) -> Result<Vec<TreeDemandPair>, DiagnosticsError> {
    let count = scenario.shattered_count();
    if count > cap {
        return Err(DiagnosticsError::TooManyShattered { count, cap });
    }
    let mut out = Vec::new();
    for i in 0..demands.len() {
        let (qs, qt) = (&scenario.q_s[i], &scenario.q_t[i]);
        if qs.iter().any(|c| qt.contains(c)) {
            continue;
        }
        let free: Vec<usize> = (0..scenario.components.len())
            .filter(|&c| scenario.shattered[c] && !qs.contains(&c) && !qt.contains(&c))
            .collect();
        for mask in 0u32..(1u32 << free.len()) {
            let (a_prime, b_prime): (Vec<usize>, Vec<usize>) =
                free.iter().enumerate().fold((Vec::new(), Vec::new()), |(mut a, mut b), (j, &c)| {
                    if mask >> j & 1 == 1 {
                        a.push(c);
                    } else {
                        b.push(c);
                    }
                    (a, b)
                });
            out.push(TreeDemandPair {
                demand: i,
                a: scenario.vertices(qs.iter().copied().chain(a_prime.iter().copied())),
                b: scenario.vertices(qt.iter().copied().chain(b_prime.iter().copied())),
                a_prime,
                b_prime,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowCheck {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Max-flow between the leaves of `A` and `B` in the tree with `M⁻¹(F)` deleted.
pub fn check_flow_lower_bound(
    tree: &TreeEmbedding,
    scenario: &CutScenario,
    pair: &TreeDemandPair,
    level: usize,
    beta: f64,
) -> Result<FlowCheck, DiagnosticsError> {
    let mut caps: Vec<f64> = tree.tree_edges().iter().map(|f| f.capacity).collect();
    for &f in &scenario.preimage {
        caps[f] = 0.0;
    }
    let caps = CapacityMap::new(caps)?;
    let value = max_flow(tree, &caps, &tree.leaves_of(&pair.a), &tree.leaves_of(&pair.b))?.value;
    let threshold = capping_threshold(level, beta);
    Ok(FlowCheck {
        value,
        threshold,
        pass: value >= threshold - 1e-9,
    })
}

/// `#shattered ≤ 2ℓβ` (with `ℓ` read as `max(ℓ, 1)`).
pub fn check_shattered_bound(scenario: &CutScenario, level: usize, beta: f64) -> bool {
    scenario.shattered_count() as f64 <= 2.0 * level.max(1) as f64 * beta + 1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReductionCheck {
    Pass,
    Fail { demand: usize },
    NotApplicable(String),
}

/// If `e_b` avoids `M⁻¹(F)` and connects every pair of `Z_F` in the tree,
/// every demand must be connected in `(H ∪ M(E_b)) ∖ F`.
pub fn check_reduction_feasibility(
    instance: &Instance,
    h: &[EdgeId],
    scenario: &CutScenario,
    tree: &TreeEmbedding,
    e_b: &[TreeEdgeId],
    pairs: &[TreeDemandPair],
) -> ReductionCheck {
    if let Some(f) = e_b.iter().find(|f| scenario.preimage.contains(f)) {
        return ReductionCheck::NotApplicable(format!("tree edge {f} is in the preimage of F"));
    }
    if let Some(p) = pairs.iter().position(|p| !connects_in_tree(tree, e_b, &p.a, &p.b)) {
        return ReductionCheck::NotApplicable(format!("pair {p} of Z_F is not connected by E_b"));
    }
    let mut edges: Vec<EdgeId> = h.iter().copied().chain(tree.map_edges(e_b.iter().copied())).collect();
    edges.sort_unstable();
    edges.dedup();
    edges.retain(|e| !scenario.failed.contains(e));
    let comps = connected_components(instance, &edges);
    let mut comp_of = vec![0; instance.n()];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    for (i, d) in instance.demands().iter().enumerate() {
        let reached: std::collections::HashSet<usize> = d.sources().iter().map(|&v| comp_of[v]).collect();
        if !d.sinks().iter().any(|v| reached.contains(&comp_of[*v])) {
            return ReductionCheck::Fail { demand: i };
        }
    }
    ReductionCheck::Pass
}

/// Probability mass of trees with `y(M⁻¹(F)) ≤ 1/2`.
pub fn good_tree_frequency(distribution: &TreeDistribution, failed: &[EdgeId]) -> f64 {
    distribution
        .trees
        .iter()
        .zip(&distribution.probabilities)
        .filter(|(t, _)| t.preimage(failed).iter().map(|&f| t.tree_edge(f).capacity).sum::<f64>() <= 0.5)
        .map(|(_, &p)| p)
        .sum()
}

/// Capped capacity of `δ(X) ∖ F` against `3/4`.
pub fn check_intact_cut_capacity(instance: &Instance, capped: &CapacityMap, failed: &[EdgeId], side: &[VertexId]) -> (f64, bool) {
    let mut inside = vec![false; instance.n()];
    for &v in side {
        inside[v] = true;
    }
    let value: f64 = instance
        .edges()
        .iter()
        .enumerate()
        .filter(|(e, edge)| inside[edge.u] != inside[edge.v] && !failed.contains(e))
        .map(|(e, _)| capped.get(e))
        .sum();
    (value, value >= 0.75 - 1e-6)
}

/// Intact cuts for demand `i`: unions of components with `S_i ⊆ X`, `T_i ∩ X = ∅`.
pub fn intact_cuts(scenario: &CutScenario, demand: usize, cap: usize) -> Option<Vec<Vec<VertexId>>> {
    let (qs, qt) = (&scenario.q_s[demand], &scenario.q_t[demand]);
    if qs.iter().any(|c| qt.contains(c)) {
        return Some(Vec::new());
    }
    let free: Vec<usize> = (0..scenario.components.len())
        .filter(|c| !qs.contains(c) && !qt.contains(c))
        .collect();
    if free.len() > cap {
        return None;
    }
    Some(
        (0u32..(1u32 << free.len()))
            .map(|mask| {
                let extra = free.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &c)| c);
                scenario.vertices(qs.iter().copied().chain(extra))
            })
            .collect(),
    )
}

/// Pass/fail counts for one bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, pass: bool) {
        self.checked += 1;
        if !pass {
            self.failed += 1;
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// One `(tree, F)` row of an audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub tree: usize,
    pub failed: Vec<EdgeId>,
    pub good: bool,
    pub load: f64,
    pub shattered: usize,
    pub pairs: usize,
    pub min_flow: Option<f64>,
    pub shattered_pass: bool,
    pub flow_pass: bool,
    pub reduction: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub shattered_cap: usize,
    pub f_sweep_cap: u64,
    /// Failure sets drawn when the sweep exceeds `f_sweep_cap`.
    pub sampled_sets: usize,
    pub intact_cap: usize,
    /// Tree-rounding calls used to estimate the connection frequency.
    pub connection_trials: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            shattered_cap: SHATTERED_CAP,
            f_sweep_cap: F_SWEEP_CAP,
            sampled_sets: 2_000,
            intact_cap: 16,
            connection_trials: 50,
        }
    }
}

/// Audit of one level over all (or sampled) failure sets and all trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAudit {
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
    pub reduction_not_applicable: usize,
    pub pair_count: Tally,
    pub counterexamples: Vec<String>,
    /// Fraction of (rounding call, demand) pairs whose sides the rounding connected.
    pub connection_frequency: Option<f64>,
    pub rows: Vec<AuditRow>,
}

impl LevelAudit {
    pub fn all_pass(&self) -> bool {
        self.shattered.ok() && self.flow.ok() && self.intact.ok() && self.reduction.ok() && self.pair_count.ok()
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

fn combinations(items: &[EdgeId], k: usize) -> Vec<Vec<EdgeId>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Tree edges outside `M⁻¹(F)` that carry a mapped path (or join equal representatives).
pub fn residual_tree_edges(tree: &TreeEmbedding, scenario: &CutScenario) -> Vec<TreeEdgeId> {
    let detached = tree.detached_edges();
    (0..tree.tree_edges().len())
        .filter(|f| !scenario.preimage.contains(f) && !detached.contains(f))
        .collect()
}

/// Sweep failure sets `F ⊆ E(H)` of size `ℓ` and check every bound on every good tree.
pub fn audit_level<R: Rng + ?Sized>(
    instance: &Instance,
    h: &[EdgeId],
    capped: &CappedCapacities,
    distribution: &TreeDistribution,
    beta_measured: f64,
    converged: bool,
    config: &AuditConfig,
    rng: &mut R,
) -> Result<LevelAudit, DiagnosticsError> {
    let level = capped.level;
    let beta = capped.beta;
    let total = binomial(h.len(), level);
    let sampled = total > config.f_sweep_cap;
    let failure_sets: Vec<Vec<EdgeId>> = if sampled {
        (0..config.sampled_sets)
            .map(|_| {
                let mut f: Vec<EdgeId> = sample(rng, h.len(), level).into_iter().map(|i| h[i]).collect();
                f.sort_unstable();
                f
            })
            .collect()
    } else {
        combinations(h, level)
    };
    let mut audit = LevelAudit {
        level,
        beta,
        beta_measured,
        converged,
        sampled,
        failure_sets: failure_sets.len(),
        good_scenarios: 0,
        min_good_frequency: 1.0,
        shattered: Tally::default(),
        flow: Tally::default(),
        intact: Tally::default(),
        reduction: Tally::default(),
        reduction_not_applicable: 0,
        pair_count: Tally::default(),
        counterexamples: Vec::new(),
        connection_frequency: None,
        rows: Vec::new(),
    };
    let bound_pairs = 2f64.powf(2.0 * level.max(1) as f64 * beta) * instance.demands().len() as f64;
    for failed in &failure_sets {
        let freq = good_tree_frequency(distribution, failed);
        audit.min_good_frequency = audit.min_good_frequency.min(freq);
        let mut intact_done = false;
        for (t, tree) in distribution.trees.iter().enumerate() {
            let scenario = analyze_cut(instance, h, failed, tree)?;
            if !intact_done {
                intact_done = true;
                for i in 0..instance.demands().len() {
                    let Some(cuts) = intact_cuts(&scenario, i, config.intact_cap) else { continue };
                    for side in cuts {
                        let (value, pass) = check_intact_cut_capacity(instance, &capped.capacities, failed, &side);
                        audit.intact.record(pass);
                        if !pass {
                            push_counterexample(&mut audit, format!("intact cut {side:?} of demand {i} under F = {failed:?}: capped capacity {}", round_sig(value)));
                        }
                    }
                }
            }
            if !scenario.good {
                audit.rows.push(AuditRow {
                    tree: t,
                    failed: failed.clone(),
                    good: false,
                    load: scenario.load,
                    shattered: scenario.shattered_count(),
                    pairs: 0,
                    min_flow: None,
                    shattered_pass: true,
                    flow_pass: true,
                    reduction: None,
                });
                continue;
            }
            audit.good_scenarios += 1;
            let shattered_pass = check_shattered_bound(&scenario, level, beta);
            audit.shattered.record(shattered_pass);
            if !shattered_pass {
                push_counterexample(&mut audit, describe(&scenario, t, "shattered count above 2ℓβ"));
            }
            let pairs = match enumerate_tree_demand_pairs(&scenario, instance.demands(), config.shattered_cap) {
                Ok(p) => p,
                Err(e) => {
                    push_counterexample(&mut audit, describe(&scenario, t, &e.to_string()));
                    continue;
                }
            };
            let pair_ok = pairs.len() as f64 <= bound_pairs + 1e-9;
            audit.pair_count.record(pair_ok);
            let mut min_flow: Option<f64> = None;
            let mut flow_pass = true;
            for pair in &pairs {
                let check = check_flow_lower_bound(tree, &scenario, pair, level, beta)?;
                audit.flow.record(check.pass);
                min_flow = Some(min_flow.map_or(check.value, |m| m.min(check.value)));
                if !check.pass {
                    flow_pass = false;
                    push_counterexample(
                        &mut audit,
                        format!(
                            "{}; pair {:?}: residual flow {} < {}",
                            describe(&scenario, t, "flow below threshold"),
                            pair,
                            round_sig(check.value),
                            round_sig(check.threshold)
                        ),
                    );
                }
            }
            let e_b = residual_tree_edges(tree, &scenario);
            let reduction = match check_reduction_feasibility(instance, h, &scenario, tree, &e_b, &pairs) {
                ReductionCheck::Pass => {
                    audit.reduction.record(true);
                    Some(true)
                }
                ReductionCheck::Fail { demand } => {
                    audit.reduction.record(false);
                    push_counterexample(&mut audit, describe(&scenario, t, &format!("demand {demand} disconnected in (H ∪ M(E_b)) ∖ F")));
                    Some(false)
                }
                ReductionCheck::NotApplicable(_) => {
                    audit.reduction_not_applicable += 1;
                    None
                }
            };
            audit.rows.push(AuditRow {
                tree: t,
                failed: failed.clone(),
                good: true,
                load: scenario.load,
                shattered: scenario.shattered_count(),
                pairs: pairs.len(),
                min_flow,
                shattered_pass,
                flow_pass,
                reduction,
            });
        }
    }
    Ok(audit)
}

/// Sample a tree and round it `trials` times; report how often each demand's
/// sides end up connected in the kept tree edges.
pub fn connection_frequency<R: Rng + ?Sized>(
    instance: &Instance,
    distribution: &TreeDistribution,
    config: &TreeRoundingConfig,
    trials: usize,
    rng: &mut R,
) -> Result<Option<f64>, DiagnosticsError> {
    let demands: Vec<&DemandPair> = instance.demands().iter().filter(|d| !d.is_degenerate()).collect();
    if trials == 0 || demands.is_empty() {
        return Ok(None);
    }
    let mut hits = 0usize;
    for _ in 0..trials {
        let tree = distribution.sample(rng);
        let out = tree_rounding(tree, config, rng)?;
        hits += demands
            .iter()
            .filter(|d| connects_in_tree(tree, &out.tree_edges, d.sources(), d.sinks()))
            .count();
    }
    Ok(Some(hits as f64 / (trials * demands.len()) as f64))
}

/// Run the solver level by level and audit each level's LARGE set and distribution.
///
/// Mixed requirements are lifted to a uniform instance first, as in the solver.
pub fn audit_instance(
    instance: &Instance,
    config: &DriverConfig,
    audit: &AuditConfig,
) -> Result<Vec<LevelAudit>, DiagnosticsError> {
    let reduction = (!instance.has_uniform_requirements()).then(|| reduce_to_uniform(instance));
    let work = reduction.as_ref().map_or(instance, |r| &r.instance);
    let mut partial = match &reduction {
        Some(r) => PartialSolution::with_bought(work, &r.auxiliary_edges),
        None => PartialSolution::empty(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    for _ in 0..work.max_requirement() {
        let setup = prepare_level(work, &partial, config, &mut rng)?;
        let fp = &setup.fix_point;
        let mut level = audit_level(work, &setup.h, &fp.capped, &fp.distribution, fp.beta_measured, fp.converged, audit, &mut rng)?;
        let rcfg = TreeRoundingConfig::for_graph(work.n(), fp.capped.threshold);
        level.connection_frequency = connection_frequency(work, &fp.distribution, &rcfg, audit.connection_trials, &mut rng)?;
        out.push(level);
        partial = augment_one_level(work, &partial, config, &mut rng)?;
    }
    Ok(out)
}

fn push_counterexample(audit: &mut LevelAudit, text: String) {
    if audit.counterexamples.len() < 20 {
        audit.counterexamples.push(text);
    }
}

fn describe(scenario: &CutScenario, tree: usize, what: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{what}: tree {tree}, F = {:?}, components {:?}, shattered {:?}, preimage {:?}, load {}",
        scenario.failed,
        scenario.components,
        scenario.shattered,
        scenario.preimage,
        round_sig(scenario.load)
    );
    s
}

/// `tree,failed,good,load,shattered,pairs,min_flow,shattered_pass,flow_pass,reduction`.
pub fn audit_csv(audit: &LevelAudit) -> String {
    let mut out = String::from("tree,failed,good,load,shattered,pairs,min_flow,shattered_pass,flow_pass,reduction\n");
    for r in &audit.rows {
        let failed: Vec<String> = r.failed.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.tree,
            failed.join(" "),
            r.good,
            round_sig(r.load),
            r.shattered,
            r.pairs,
            r.min_flow.map(|v| round_sig(v).to_string()).unwrap_or_default(),
            r.shattered_pass,
            r.flow_pass,
            match r.reduction {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "n/a",
            }
        );
    }
    out
}
