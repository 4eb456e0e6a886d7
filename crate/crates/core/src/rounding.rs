//! Multi-scale marking plus scaled tree rounding.
//!
//! For every scale `q` and every tree node `v`, the node is marked with
//! probability `min(1, (8/f) · 2^{−q})`. A marked node runs the dependent
//! rounding of [`crate::gkr`] `τ′` times on its subtree with capacities scaled
//! by `2^{q+1}`, and every kept tree edge contributes its mapped graph path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{TreeEdgeId, TreeEmbedding};
use crate::gkr::{round_gkr, RoundingError, RoundingTree};
use crate::graph::{EdgeId, Instance, Network, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRoundingConfig {
    /// Flow parameter `f ∈ (0, 1]`.
    pub f: f64,
    /// Rounding repetitions per marked node.
    pub tau_prime: usize,
    /// Largest scale, iterated inclusively from 0.
    pub q_max: usize,
}

/// `ceil(4 · ln n) + 4`.
pub fn default_tau_prime(n: usize) -> usize {
    (4.0 * (n.max(1) as f64).ln()).ceil() as usize + 4
}

/// `ceil(2 · log2(2n² / f))`.
pub fn default_q_max(n: usize, f: f64) -> usize {
    let n = n.max(1) as f64;
    (2.0 * (2.0 * n * n / f).log2()).ceil().max(0.0) as usize
}

/// `min(1, (8/f) · 2^{−q})`.
pub fn mark_probability(f: f64, q: usize) -> f64 {
    (8.0 / f * 0.5f64.powi(q as i32)).min(1.0)
}

impl TreeRoundingConfig {
    pub fn for_graph(n: usize, f: f64) -> Self {
        TreeRoundingConfig {
            f,
            tau_prime: default_tau_prime(n),
            q_max: default_q_max(n, f),
        }
    }

    pub fn validate(&self) -> Result<(), RoundingError> {
        if !(self.f > 0.0 && self.f <= 1.0) {
            return Err(RoundingError::InvalidConfig(format!("f = {} is outside (0, 1]", self.f)));
        }
        if self.tau_prime == 0 {
            return Err(RoundingError::InvalidConfig("tau_prime must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutput {
    /// Graph edges on the mapped paths of the kept tree edges, sorted.
    pub edges: Vec<EdgeId>,
    /// Kept tree edges over all marked nodes and repetitions, sorted.
    pub tree_edges: Vec<TreeEdgeId>,
    pub marked: usize,
}

/// One call of the marking-and-rounding procedure.
///
/// Randomness is consumed from `rng` in a fixed order: scales outer, node ids
/// inner, each marking draw followed by that node's roundings.
pub fn tree_rounding<R: Rng + ?Sized>(
    embedding: &TreeEmbedding,
    config: &TreeRoundingConfig,
    rng: &mut R,
) -> Result<RoundingOutput, RoundingError> {
    config.validate()?;
    let mut kept = vec![false; embedding.tree_edges().len()];
    let mut marked = 0;
    for q in 0..=config.q_max {
        let p = mark_probability(config.f, q);
        let scale = 2f64.powi(q as i32 + 1);
        for v in 0..embedding.nodes().len() {
            let hit = p >= 1.0 || rng.gen::<f64>() < p;
            if !hit || embedding.is_leaf(v) {
                continue;
            }
            marked += 1;
            let view = RoundingTree::from_embedding(embedding, v, scale);
            for _ in 0..config.tau_prime {
                for f in round_gkr(&view, rng) {
                    kept[f] = true;
                }
            }
        }
    }
    let tree_edges: Vec<TreeEdgeId> = (0..kept.len()).filter(|&f| kept[f]).collect();
    let edges = embedding.map_edges(tree_edges.iter().copied());
    Ok(RoundingOutput {
        edges,
        tree_edges,
        marked,
    })
}

/// Whether some leaf of `a` reaches some leaf of `b` using only `tree_edges`.
pub fn connects_in_tree(embedding: &TreeEmbedding, tree_edges: &[TreeEdgeId], a: &[VertexId], b: &[VertexId]) -> bool {
    let mut parent: Vec<usize> = (0..embedding.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &f in tree_edges {
        let (u, v) = embedding.endpoints(f);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let roots: std::collections::HashSet<usize> = a.iter().map(|&v| find(&mut parent, embedding.leaf(v))).collect();
    b.iter().any(|&v| roots.contains(&find(&mut parent, embedding.leaf(v))))
}

/// Empirical selection statistics over independent calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostAudit {
    pub trials: usize,
    /// Per graph edge, fraction of trials that selected it.
    pub frequencies: Vec<f64>,
    pub mean_cost: f64,
    pub costs: Vec<f64>,
}

/// Run `trials` independent calls, trial `t` on stream `t` of `seed`.
pub fn expected_cost_audit(
    instance: &Instance,
    embedding: &TreeEmbedding,
    config: &TreeRoundingConfig,
    trials: usize,
    seed: u64,
) -> Result<CostAudit, RoundingError> {
    if trials == 0 {
        return Err(RoundingError::InvalidConfig("trials must be at least 1".into()));
    }
    config.validate()?;
    let outputs: Vec<RoundingOutput> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            tree_rounding(embedding, config, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let m = instance.edges().len();
    let mut counts = vec![0usize; m];
    let mut costs = Vec::with_capacity(trials);
    for out in &outputs {
        for &e in &out.edges {
            counts[e] += 1;
        }
        costs.push(instance.cost_of(&out.edges));
    }
    let mean_cost = costs.iter().sum::<f64>() / trials as f64;
    Ok(CostAudit {
        trials,
        frequencies: counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        mean_cost,
        costs,
    })
}

/// Union bound on each graph edge's selection probability:
/// `Σ_{f ∈ M⁻¹(e)} height · τ′ · Σ_q min(1, (8/f)2^{−q}) · min(1, 2^{q+1} y(f))`.
pub fn selection_bound(embedding: &TreeEmbedding, config: &TreeRoundingConfig, graph_edges: usize) -> Vec<f64> {
    let height = embedding.height().max(1) as f64;
    let mut bound = vec![0.0; graph_edges];
    for t in embedding.tree_edges() {
        let per_edge: f64 = (0..=config.q_max)
            .map(|q| mark_probability(config.f, q) * (2f64.powi(q as i32 + 1) * t.capacity).min(1.0))
            .sum::<f64>()
            * height
            * config.tau_prime as f64;
        let mut seen = t.path.clone();
        seen.sort_unstable();
        seen.dedup();
        for e in seen {
            bound[e] += per_edge;
        }
    }
    bound
}
