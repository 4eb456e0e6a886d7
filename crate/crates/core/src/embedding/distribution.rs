use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_decomposition_tree, cap_capacities, CappedCapacities, EmbeddingConfig, TreeEmbedding};
use crate::graph::{CapacityMap, EdgeId, GraphError, Instance};
use crate::lp::FractionalSolution;

/// Expected relative loads of a distribution over trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongestionTable {
    /// `E_T[load_T(e)]`.
    pub expected_load: Vec<f64>,
    /// `E_T[load_T(e)] / x̃_e`, and 0 where `x̃_e = 0`.
    pub rload: Vec<f64>,
    /// `max_e rload(e)`.
    pub beta: f64,
    pub argmax: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDistribution {
    pub trees: Vec<TreeEmbedding>,
    pub probabilities: Vec<f64>,
    pub congestion: CongestionTable,
}

impl TreeDistribution {
    /// Draw a tree index according to the probabilities.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u: f64 = rng.gen::<f64>();
        for (i, &p) in self.probabilities.iter().enumerate() {
            if u < p {
                return i;
            }
            u -= p;
        }
        self.probabilities.len() - 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &TreeEmbedding {
        &self.trees[self.sample_index(rng)]
    }
}

/// Expected loads of `trees` under `probabilities`, relative to `caps`.
pub fn measure_congestion(trees: &[TreeEmbedding], probabilities: &[f64], caps: &CapacityMap) -> CongestionTable {
    let m = caps.len();
    let mut expected_load = vec![0.0; m];
    for (t, &p) in trees.iter().zip(probabilities) {
        for (e, l) in t.loads(m).into_iter().enumerate() {
            expected_load[e] += p * l;
        }
    }
    let rload: Vec<f64> = expected_load
        .iter()
        .zip(caps.as_slice())
        .map(|(&l, &c)| if c > 0.0 { l / c } else { 0.0 })
        .collect();
    let mut beta = 0.0;
    let mut argmax = None;
    for (e, &r) in rload.iter().enumerate() {
        if r > beta {
            beta = r;
            argmax = Some(e);
        }
    }
    CongestionTable {
        expected_load,
        rload,
        beta,
        argmax,
    }
}

/// A uniform distribution over trees grown with multiplicative weights.
///
/// After each tree the length weight of every edge is multiplied by
/// `exp(ε · rload_T(e) / max rload_T)`.
pub fn build_distribution<R: Rng + ?Sized>(
    instance: &Instance,
    caps: &CapacityMap,
    config: &EmbeddingConfig,
    rng: &mut R,
) -> Result<TreeDistribution, GraphError> {
    let m = instance.edges().len();
    let count = config.trees_for(instance.n());
    let mut weights = vec![1.0; m];
    let mut trees = Vec::with_capacity(count);
    for _ in 0..count {
        let tree = build_decomposition_tree(instance, caps, &weights, config, rng)?;
        let loads = tree.loads(m);
        let rel: Vec<f64> = loads
            .iter()
            .zip(caps.as_slice())
            .map(|(&l, &c)| if c > 0.0 { l / c } else { 0.0 })
            .collect();
        let top = rel.iter().copied().fold(0.0, f64::max);
        if top > 0.0 {
            for (w, r) in weights.iter_mut().zip(&rel) {
                *w *= (config.eps_mwu * r / top).exp();
            }
            let scale = weights.iter().copied().fold(0.0, f64::max);
            for w in &mut weights {
                *w /= scale;
            }
        }
        trees.push(tree);
    }
    let probabilities = vec![1.0 / count as f64; count];
    let congestion = measure_congestion(&trees, &probabilities, caps);
    Ok(TreeDistribution {
        trees,
        probabilities,
        congestion,
    })
}

/// Outcome of the β fix-point iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFixPoint {
    /// The β used for capping.
    pub beta: f64,
    /// Congestion of the final distribution under the final capping.
    pub beta_measured: f64,
    pub converged: bool,
    pub iterations: usize,
    pub capped: CappedCapacities,
    pub distribution: TreeDistribution,
}

/// Starting value `max(1, ceil(log2 n))`.
pub fn initial_beta(n: usize) -> f64 {
    (n.max(1) as f64).log2().ceil().max(1.0)
}

/// Cap with an assumed β (starting at `beta0`), build the distribution, and
/// raise β to the measured congestion until the assumption holds or
/// `max_iters` runs out.
pub fn fix_point_beta<R: Rng + ?Sized>(
    instance: &Instance,
    x: &FractionalSolution,
    level: usize,
    beta0: f64,
    config: &EmbeddingConfig,
    max_iters: usize,
    rng: &mut R,
) -> Result<BetaFixPoint, GraphError> {
    let n = instance.n();
    let mut beta = beta0.max(1.0);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let capped = cap_capacities(x, level, beta, n);
        let distribution = build_distribution(instance, &capped.capacities, config, rng)?;
        let measured = distribution.congestion.beta;
        let converged = measured <= beta * (1.0 + 1e-9);
        if converged || iterations >= max_iters.max(1) {
            return Ok(BetaFixPoint {
                beta,
                beta_measured: measured,
                converged,
                iterations,
                capped,
                distribution,
            });
        }
        beta = measured.ceil().max(beta + 1.0);
    }
}
