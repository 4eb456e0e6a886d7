//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p gsndp-core --test acceptance -- --nocapture` to see
//! the lines.

use std::collections::BTreeSet;
use std::time::Instant;

use gsndp_core::diagnostics::{audit_instance, audit_level, AuditConfig, LevelAudit};
use gsndp_core::driver::{augment_one_level, prepare_level, solve, DriverConfig, PartialSolution};
use gsndp_core::embedding::{fix_point_beta, initial_beta, TreeDistribution, TreeEmbedding};
use gsndp_core::gkr::{exact_connect_probability, round_gkr, RoundingTree};
use gsndp_core::graph::{
    cut_capacity, max_flow, reduce_to_uniform, set_pair_edge_connectivity, CapacityMap, EdgeId, Instance, VertexId,
};
use gsndp_core::harness::{canonical_json, gen_random, run_experiment, Cell, GenParams, InstanceSource, Manifest};
use gsndp_core::lp::{build_augmentation_lp, solve_fractional, verify_lp_feasibility, FractionalSolution};
use gsndp_core::rounding::{connects_in_tree, expected_cost_audit, selection_bound, tree_rounding, TreeRoundingConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Instance `i` of the end-to-end family: n in 6..=30, q in 1..=4, k in 1..=3,
/// mixed requirements on every other instance with q >= 2.
fn family(i: u64) -> Instance {
    let n = 6 + (i as usize * 7) % 25;
    let q = 1 + (i as usize % 4);
    let k = 1 + (i as u32 / 4) % 3;
    let density = (150.0 / (n * (n - 1)) as f64).min(0.6);
    let params = GenParams {
        n,
        density,
        q,
        k,
        mixed: q >= 2 && i % 2 == 1,
        side_max: 3.min(n / 2),
        max_edges: Some(90),
        max_attempts: 2_000,
        ..GenParams::default()
    };
    gen_random(&params, 1_000 + i).expect("family instance")
}

fn tiny(i: u64, max_edges: usize) -> Instance {
    let n = 5 + (i as usize % 4);
    let params = GenParams {
        n,
        density: 0.55,
        q: 1 + (i as usize % 3),
        k: 1 + (i as u32 % 3),
        mixed: i % 3 == 2,
        side_max: 2,
        max_edges: Some(max_edges),
        max_attempts: 5_000,
        ..GenParams::default()
    };
    gen_random(&params, 7_000 + i).expect("tiny instance")
}

/// Cheapest feasible edge subset by exhaustive search with cost pruning.
fn brute_force_opt(inst: &Instance) -> f64 {
    let m = inst.edges().len();
    assert!(m <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << m) {
        let h: Vec<EdgeId> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        let c = inst.cost_of(&h);
        if c < best && inst.is_feasible(&h) {
            best = c;
        }
    }
    best
}

/// Minimum of `x(δ(X))` over every vertex set separating a demand, by enumeration.
fn brute_force_min_cut_slack(inst: &Instance, x: &[f64], k: usize) -> f64 {
    let n = inst.n();
    let mut worst = f64::INFINITY;
    for mask in 1u32..(1u32 << n) - 1 {
        let inside = |v: VertexId| mask >> v & 1 == 1;
        let separates = inst.demands().iter().any(|d| {
            !d.is_degenerate() && d.sources().iter().all(|&v| inside(v)) && d.sinks().iter().all(|&v| !inside(v))
        });
        if !separates {
            continue;
        }
        let cut: f64 = inst
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| inside(e.u) != inside(e.v))
            .map(|(i, _)| x[i].min(1.0))
            .sum();
        worst = worst.min(cut - k as f64);
    }
    worst
}

fn working_instance(inst: &Instance) -> (Instance, PartialSolution) {
    if inst.has_uniform_requirements() {
        (inst.clone(), PartialSolution::empty())
    } else {
        let r = reduce_to_uniform(inst);
        let p = PartialSolution::with_bought(&r.instance, &r.auxiliary_edges);
        (r.instance, p)
    }
}

#[test]
fn end_to_end_feasibility() {
    let start = Instant::now();
    let instances: Vec<Instance> = (0..50).map(family).collect();
    let outcomes: Vec<(bool, usize, bool)> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let cfg = DriverConfig {
                seed: i as u64,
                ..DriverConfig::default()
            };
            let ok = match solve(inst, &cfg) {
                Ok(sol) => inst.demands().iter().all(|d| {
                    set_pair_edge_connectivity(inst, &sol.edges, d.sources(), d.sinks())
                        .unwrap()
                        .at_least(d.requirement() as usize)
                }),
                Err(e) => {
                    println!("  instance {i}: {e}");
                    false
                }
            };
            (ok, inst.edges().len(), !inst.has_uniform_requirements())
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let passed = outcomes.iter().filter(|o| o.0).count();
    let mixed = outcomes.iter().filter(|o| o.2).count();
    let max_m = outcomes.iter().map(|o| o.1).max().unwrap();
    assert!(instances.iter().all(|i| i.n() <= 30 && i.edges().len() <= 90 && i.demands().len() <= 4));
    let pass = passed == 50 && secs < 300.0 && mixed > 0;
    report(
        "end-to-end feasibility",
        pass,
        &format!("{passed}/50 feasible ({mixed} mixed, max |E| = {max_m}) in {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn lp_correctness() {
    let mut verified = 0;
    let mut failures = Vec::new();
    let mut compared = 0;
    let mut small: Vec<Instance> = (0..12).map(|i| tiny(i, 18)).collect();
    small.extend((0..50).map(family).filter(|i| i.edges().len() <= 18));
    let large: Vec<Instance> = (0..50).step_by(5).map(family).collect();
    for (idx, inst) in small.iter().chain(&large).enumerate() {
        let (work, mut partial) = working_instance(inst);
        let k = work.max_requirement() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(idx as u64);
        let cfg = DriverConfig::default();
        let mut lower = 0.0f64;
        for level in 0..k {
            let lp = build_augmentation_lp(&work, &partial.bought, level);
            let x = solve_fractional(&lp, cfg.lp_tolerance).unwrap();
            let rep = verify_lp_feasibility(&work, &x.x, level + 1, 1e-6).unwrap();
            verified += 1;
            if !rep.ok() {
                failures.push(format!("instance {idx} level {level}: separation verifier rejects x"));
            }
            if work.n() <= 14 {
                let slack = brute_force_min_cut_slack(&work, &x.x, level + 1);
                if slack < -1e-6 {
                    failures.push(format!("instance {idx} level {level}: enumerated cut short by {slack}"));
                }
            }
            lower = lower.max(x.objective);
            partial = augment_one_level(&work, &partial, &cfg, &mut rng).unwrap();
        }
        if idx < small.len() {
            compared += 1;
            let opt = brute_force_opt(inst);
            let sol = solve(inst, &cfg).unwrap();
            if !(sol.report.lower_bound <= opt + 1e-6 && lower <= opt + 1e-6 && opt <= sol.cost + 1e-6) {
                failures.push(format!(
                    "instance {idx}: LP {} / OPT {opt} / cost {}",
                    sol.report.lower_bound, sol.cost
                ));
            }
        }
    }
    let pass = failures.is_empty();
    for f in &failures {
        println!("  {f}");
    }
    report(
        "LP correctness",
        pass,
        &format!("{verified} level LPs verified, {compared} instances with |E| <= 18 compared to exhaustive OPT"),
    );
    assert!(pass);
}

fn distribution_for(inst: &Instance, seed: u64) -> (Instance, CapacityMap, TreeDistribution, f64, f64) {
    let (work, partial) = working_instance(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setup = prepare_level(&work, &partial, &DriverConfig::default(), &mut rng).unwrap();
    let fp = setup.fix_point;
    let caps = fp.capped.capacities.clone();
    (work, caps, fp.distribution, fp.beta_measured, fp.capped.threshold)
}

fn random_disjoint_pair<R: Rng>(n: usize, rng: &mut R) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut vs: Vec<VertexId> = (0..n).collect();
    vs.shuffle(rng);
    let a = rng.gen_range(1..n);
    let b = rng.gen_range(1..=n - a);
    let mut left = vs[..a].to_vec();
    let mut right = vs[a..a + b].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    (left, right)
}

fn check_tree(inst: &Instance, caps: &CapacityMap, tree: &TreeEmbedding, rng: &mut ChaCha8Rng, pairs: usize) -> Vec<String> {
    let mut bad = Vec::new();
    let n = inst.n();
    for (f, t) in tree.tree_edges().iter().enumerate() {
        let cluster = &tree.node(t.child).cluster;
        let recomputed = cut_capacity(inst, caps, cluster);
        if (recomputed - t.capacity).abs() > 1e-12 {
            bad.push(format!("tree edge {f}: stored {} vs recomputed {recomputed}", t.capacity));
        }
    }
    let leaves: BTreeSet<usize> = (0..n).map(|v| tree.leaf(v)).collect();
    let is_leaf_count = (0..tree.nodes().len()).filter(|&v| tree.is_leaf(v)).count();
    if leaves.len() != n || is_leaf_count != n || (0..n).any(|v| tree.vertex_of_leaf(tree.leaf(v)) != Some(v)) {
        bad.push("leaf map is not a bijection".into());
    }
    let bound = (4.0 * (2.0 * (n as f64).powi(3)).log2()).ceil() as usize;
    if tree.height() > bound {
        bad.push(format!("height {} above {bound}", tree.height()));
    }
    let tcaps = tree.capacities();
    for _ in 0..pairs {
        let (a, b) = random_disjoint_pair(n, rng);
        let g = max_flow(inst, caps, &a, &b).unwrap().value;
        let t = max_flow(tree, &tcaps, &tree.leaves_of(&a), &tree.leaves_of(&b)).unwrap().value;
        if t < g - 1e-9 {
            bad.push(format!("flow {a:?} -> {b:?}: tree {t} below graph {g}"));
        }
    }
    bad
}

#[test]
fn embedding_contract() {
    let results: Vec<(usize, Vec<String>)> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let inst = family(i * 2 + 1);
            let (work, caps, dist, _, _) = distribution_for(&inst, i);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + i);
            let mut bad = Vec::new();
            for tree in &dist.trees {
                bad.extend(check_tree(&work, &caps, tree, &mut rng, 0));
            }
            let tree = &dist.trees[0];
            bad.extend(check_tree(&work, &caps, tree, &mut rng, 100));
            (dist.trees.len(), bad)
        })
        .collect();
    let trees: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    for b in bad.iter().take(10) {
        println!("  {b}");
    }
    let pass = bad.is_empty();
    report(
        "embedding contract",
        pass,
        &format!("20 instances, {trees} trees checked, 100 set pairs per instance, {} violations", bad.len()),
    );
    assert!(pass);
}

fn random_rounding_tree(rng: &mut ChaCha8Rng) -> RoundingTree {
    let k = rng.gen_range(3..=15);
    let parents: Vec<usize> = (1..k).map(|i| rng.gen_range(0..i)).collect();
    let caps: Vec<f64> = (1..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    RoundingTree::from_parts(&parents, &caps).unwrap()
}

#[test]
fn gkr_oracle_equivalence() {
    const TRIALS: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cases: Vec<(RoundingTree, Vec<usize>, u64)> = (0..30)
        .map(|c| {
            let tree = random_rounding_tree(&mut rng);
            let leaves = tree.leaves();
            let size = rng.gen_range(1..=leaves.len());
            let group: Vec<usize> = leaves.choose_multiple(&mut rng, size).copied().collect();
            (tree, group, c)
        })
        .collect();
    let outcomes: Vec<(bool, usize, usize)> = cases
        .par_iter()
        .map(|(tree, group, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(9_000 + c);
            let exact = exact_connect_probability(tree, group).unwrap();
            let edges = tree.len() - 1;
            let mut kept = vec![0usize; edges];
            let mut hits = 0usize;
            for _ in 0..TRIALS {
                let out = round_gkr(tree, &mut rng);
                for &f in &out {
                    kept[f] += 1;
                }
                if group.iter().any(|&g| out.binary_search(&(g - 1)).is_ok()) {
                    hits += 1;
                }
            }
            let within = |freq: f64, p: f64| {
                let se = (p * (1.0 - p) / TRIALS as f64).sqrt();
                (freq - p).abs() <= 3.0 * se + 1e-12
            };
            let conn_ok = within(hits as f64 / TRIALS as f64, exact);
            let marg_bad = tree
                .edges()
                .filter(|&(f, y)| !within(kept[f] as f64 / TRIALS as f64, y))
                .count();
            (conn_ok, marg_bad, edges)
        })
        .collect();
    let conn_ok = outcomes.iter().filter(|o| o.0).count();
    let marg_bad: usize = outcomes.iter().map(|o| o.1).sum();
    let marg_total: usize = outcomes.iter().map(|o| o.2).sum();
    let mut star = Vec::new();
    for m in [2usize, 3, 5] {
        let tree = RoundingTree::from_parts(&vec![0; m], &vec![1.0 / m as f64; m]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
        let hits = (0..TRIALS).filter(|_| !round_gkr(&tree, &mut rng).is_empty()).count();
        let closed = 1.0 - (1.0 - 1.0 / m as f64).powi(m as i32);
        star.push((m, hits as f64 / TRIALS as f64, closed));
    }
    let star_ok = star.iter().all(|&(_, f, c)| (f - c).abs() <= 0.01);
    for (m, f, c) in &star {
        println!("  star m = {m}: frequency {f:.4}, closed form {c:.4}");
    }
    let pass = conn_ok == 30 && marg_bad == 0 && star_ok;
    report(
        "GKR oracle equivalence",
        pass,
        &format!(
            "{conn_ok}/30 connection frequencies and {}/{marg_total} marginals within 3 standard errors, stars within 0.01: {star_ok}",
            marg_total - marg_bad
        ),
    );
    assert!(pass);
}

#[test]
fn tree_rounding_connects() {
    const TRIALS: usize = 400;
    let mut cases = Vec::new();
    let mut i = 0u64;
    while cases.len() < 20 {
        let inst = tiny_or_medium(i);
        let (work, _, dist, _, _) = distribution_for(&inst, i);
        let mut rng = ChaCha8Rng::seed_from_u64(500 + i);
        let tree = dist.trees[rng.gen_range(0..dist.trees.len())].clone();
        let tcaps = tree.capacities();
        for _ in 0..20 {
            let (a, b) = random_disjoint_pair(work.n(), &mut rng);
            let flow = max_flow(&tree, &tcaps, &tree.leaves_of(&a), &tree.leaves_of(&b)).unwrap().value;
            if flow > 1e-6 {
                cases.push((tree.clone(), a, b, flow.min(1.0), i));
                break;
            }
        }
        i += 1;
    }
    let freqs: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(tree, a, b, f, seed)| {
            let cfg = TreeRoundingConfig::for_graph(tree.graph_vertex_count(), *f);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let hits = (0..TRIALS)
                .filter(|_| {
                    let out = tree_rounding(tree, &cfg, &mut rng).unwrap();
                    connects_in_tree(tree, &out.tree_edges, a, b)
                })
                .count();
            (hits as f64 / TRIALS as f64, *f)
        })
        .collect();
    let min = freqs.iter().map(|p| p.0).fold(1.0, f64::min);
    let min_f = freqs.iter().map(|p| p.1).fold(1.0, f64::min);
    let pass = min >= 0.15;
    report(
        "tree rounding connection",
        pass,
        &format!("20 cases (smallest tree flow {min_f:.4}), minimum frequency {min:.3} over {TRIALS} trials, threshold 0.15"),
    );
    assert!(pass);
}

fn tiny_or_medium(i: u64) -> Instance {
    if i % 2 == 0 {
        tiny(i, 20)
    } else {
        family(i)
    }
}

#[test]
fn tree_rounding_cost_budget() {
    const TRIALS: usize = 500;
    const K: f64 = 64.0;
    let rows: Vec<(bool, bool, f64, f64)> = (0..10u64)
        .into_par_iter()
        .map(|i| {
            let inst = family(3 * i + 2);
            let (work, partial) = working_instance(&inst);
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let cfg = DriverConfig::default();
            let setup = prepare_level(&work, &partial, &cfg, &mut rng).unwrap();
            let fp = &setup.fix_point;
            let tree = fp.distribution.sample(&mut rng).clone();
            let n = work.n();
            let f = fp.capped.threshold;
            let rcfg = TreeRoundingConfig::for_graph(n, f);
            let audit = expected_cost_audit(&work, &tree, &rcfg, TRIALS, 77 + i).unwrap();
            let cx: f64 = work.edges().iter().zip(&setup.x.x).map(|(e, x)| e.cost * x).sum();
            let budget = K / f * fp.beta_measured * (n as f64).log2().powi(3) * cx;
            let cost_ok = audit.mean_cost <= budget + 1e-9;
            let bound = selection_bound(&tree, &rcfg, work.edges().len());
            let edges_ok = audit.frequencies.iter().zip(&bound).all(|(&freq, &b)| {
                let p = b.min(1.0);
                freq <= p + 3.0 * (p * (1.0 - p) / TRIALS as f64).sqrt() + 1e-12
            });
            (cost_ok, edges_ok, audit.mean_cost, budget)
        })
        .collect();
    let cost_ok = rows.iter().filter(|r| r.0).count();
    let edges_ok = rows.iter().filter(|r| r.1).count();
    let worst = rows.iter().map(|r| r.2 / r.3.max(1e-300)).fold(0.0, f64::max);
    let pass = cost_ok == 10 && edges_ok == 10;
    report(
        "tree rounding cost budget",
        pass,
        &format!("{cost_ok}/10 mean costs within budget (largest mean/budget {worst:.2e}), {edges_ok}/10 instances with every edge under its marginal bound"),
    );
    assert!(pass);
}

fn audit_family() -> Vec<(Instance, Vec<LevelAudit>)> {
    (0..10u64)
        .into_par_iter()
        .map(|i| {
            let params = GenParams {
                n: 6 + (i as usize % 3),
                density: 0.6,
                q: 1 + (i as usize % 3),
                k: 1 + (i as u32 % 3),
                mixed: i % 4 == 3,
                side_max: 2,
                ..GenParams::default()
            };
            let inst = gen_random(&params, 3_000 + i).unwrap();
            let cfg = DriverConfig {
                seed: i,
                ..DriverConfig::default()
            };
            let audits = audit_instance(&inst, &cfg, &AuditConfig::default()).unwrap();
            (inst, audits)
        })
        .collect()
}

/// Audits at LP-feasible points with many SMALL edges: the mean of optima
/// under randomly perturbed costs, on dense graphs with n <= 8.
fn spread_audit_family() -> Vec<(Instance, Vec<LevelAudit>)> {
    (0..10u64)
        .into_par_iter()
        .map(|i| {
            let params = GenParams {
                n: 7 + (i as usize % 2),
                density: 1.0,
                q: 1 + (i as usize % 2),
                k: 1 + (i as u32 % 3),
                side_max: 2,
                ..GenParams::default()
            };
            let inst = gen_random(&params, 4_000 + i).unwrap();
            let cfg = DriverConfig {
                seed: i,
                ..DriverConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let mut partial = PartialSolution::empty();
            let mut audits = Vec::new();
            for level in 0..inst.max_requirement() as usize {
                let lp = build_augmentation_lp(&inst, &partial.bought, level);
                let mut mean = vec![0.0; inst.edges().len()];
                const DRAWS: usize = 64;
                for _ in 0..DRAWS {
                    let mut perturbed = lp.clone();
                    for c in perturbed.costs.iter_mut().filter(|c| **c > 0.0) {
                        *c *= rng.gen_range(-4.0f64..4.0).exp();
                    }
                    let x = solve_fractional(&perturbed, cfg.lp_tolerance).unwrap();
                    for (m, v) in mean.iter_mut().zip(&x.x) {
                        *m += v / DRAWS as f64;
                    }
                }
                assert!(verify_lp_feasibility(&inst, &mean, level + 1, 1e-6).unwrap().ok());
                let objective = mean.iter().zip(&lp.costs).map(|(x, c)| x * c).sum();
                let x = FractionalSolution { x: mean, objective };
                let fp = fix_point_beta(&inst, &x, level, initial_beta(inst.n()), &cfg.embedding(), cfg.max_beta_iters, &mut rng)
                    .unwrap();
                let mut h: Vec<EdgeId> = partial.bought.iter().chain(&fp.capped.large).copied().collect();
                h.sort_unstable();
                h.dedup();
                let audit = audit_level(
                    &inst,
                    &h,
                    &fp.capped,
                    &fp.distribution,
                    fp.beta_measured,
                    fp.converged,
                    &AuditConfig::default(),
                    &mut rng,
                )
                .unwrap();
                audits.push(audit);
                partial = augment_one_level(&inst, &partial, &cfg, &mut rng).unwrap();
            }
            (inst, audits)
        })
        .collect()
}

fn tally_audits(name: &str, runs: &[(Instance, Vec<LevelAudit>)]) -> (bool, String) {
    let mut levels = 0;
    let mut failed = Vec::new();
    let (mut shattered, mut flow, mut intact, mut reduction, mut sets) = (0, 0, 0, 0, 0);
    for (i, (inst, audits)) in runs.iter().enumerate() {
        assert!(inst.n() <= 8);
        for a in audits {
            assert!(a.level <= 2);
            levels += 1;
            sets += a.failure_sets;
            shattered += a.shattered.checked;
            flow += a.flow.checked;
            intact += a.intact.checked;
            reduction += a.reduction.checked;
            if !a.all_pass() {
                failed.push((i, a.level, a.counterexamples.clone()));
            }
        }
    }
    for (i, level, ces) in &failed {
        for c in ces {
            println!("  {name} instance {i} level {level}: {c}");
        }
    }
    let detail = format!(
        "{name}: {} instances, {levels} levels, {sets} failure sets, checks run: shattered {shattered}, residual flow {flow}, intact cuts {intact}, reduction {reduction}",
        runs.len()
    );
    (failed.is_empty() && levels > 0, detail)
}

#[test]
fn structural_audits() {
    let (lp_pass, lp_detail) = tally_audits("LP optima", &audit_family());
    let (spread_pass, spread_detail) = tally_audits("perturbed-cost means", &spread_audit_family());
    let pass = lp_pass && spread_pass;
    report("structural audits", pass, &format!("{lp_detail}; {spread_detail}"));
    assert!(pass);
}

#[test]
fn good_tree_frequency() {
    let runs = audit_family();
    let mut converged = 0;
    let mut excluded = 0;
    let mut min = 1.0f64;
    for (_, audits) in &runs {
        for a in audits {
            if a.converged && a.beta_measured <= a.beta * (1.0 + 1e-9) {
                converged += 1;
                min = min.min(a.min_good_frequency);
            } else {
                excluded += 1;
            }
        }
    }
    let pass = converged > 0 && min >= 0.45;
    report(
        "good-tree frequency",
        pass,
        &format!("{converged} converged levels, minimum weighted frequency {min:.3} (threshold 0.45), {excluded} non-converged excluded"),
    );
    assert!(pass);
}

#[test]
fn reproducibility() {
    let mut same = 0;
    for i in 0..5u64 {
        let inst = family(i * 9);
        let cfg = DriverConfig {
            seed: 42 + i,
            ..DriverConfig::default()
        };
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        if a.edges == b.edges && canonical_json(&a.report).unwrap() == canonical_json(&b.report).unwrap() {
            same += 1;
        }
    }
    let manifest = Manifest {
        cells: vec![Cell {
            name: "repro".into(),
            instance: InstanceSource::Generate {
                params: GenParams {
                    n: 12,
                    q: 3,
                    k: 2,
                    mixed: true,
                    ..GenParams::default()
                },
                seed: 8,
            },
            config: DriverConfig::default(),
            seeds: vec![1, 2, 3],
            diagnostics: false,
        }],
        workers: Some(3),
    };
    let strip = |m: &Manifest| {
        let out = run_experiment(m, std::path::Path::new("."));
        let recs: Vec<_> = out.records.iter().map(|r| r.without_timings()).collect();
        (canonical_json(&recs).unwrap(), out.files)
    };
    let experiment_same = strip(&manifest) == strip(&manifest);
    let pass = same == 5 && experiment_same;
    report(
        "reproducibility",
        pass,
        &format!("{same}/5 solves byte-identical across runs, experiment outputs identical: {experiment_same}"),
    );
    assert!(pass);
}
