use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{round_sig, HarnessError};
use crate::graph::{set_pair_edge_connectivity, DemandPair, Edge, Instance};

/// Random instance parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub n: usize,
    /// Independent probability of each vertex pair being an edge.
    pub density: f64,
    pub cost_min: f64,
    pub cost_max: f64,
    /// Number of demands.
    pub q: usize,
    /// Requirement (the maximum one when `mixed`).
    pub k: u32,
    /// Draw each requirement uniformly from `1..=k`.
    pub mixed: bool,
    /// Inclusive range of sizes for each demand side.
    pub side_min: usize,
    pub side_max: usize,
    /// Reject graphs with more edges than this.
    pub max_edges: Option<usize>,
    pub max_attempts: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 10,
            density: 0.4,
            cost_min: 1.0,
            cost_max: 10.0,
            q: 2,
            k: 2,
            mixed: false,
            side_min: 1,
            side_max: 2,
            max_edges: None,
            max_attempts: 500,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Params(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.density) {
            return bad("density must lie in [0, 1]");
        }
        if !(self.cost_min >= 0.0 && self.cost_min <= self.cost_max && self.cost_max.is_finite()) {
            return bad("cost range must satisfy 0 <= cost_min <= cost_max < inf");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.side_min == 0 || self.side_min > self.side_max || 2 * self.side_min > self.n {
            return bad("demand side sizes must satisfy 1 <= side_min <= side_max and 2 side_min <= n");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        Ok(())
    }
}

/// Erdős–Rényi graph plus random disjoint demand sides, redrawn until every
/// demand can reach its requirement in the full graph.
pub fn gen_random(params: &GenParams, seed: u64) -> Result<Instance, HarnessError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    for _ in 0..params.max_attempts {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(params.density) {
                    let cost = if params.cost_max > params.cost_min {
                        rng.gen_range(params.cost_min..params.cost_max)
                    } else {
                        params.cost_min
                    };
                    edges.push(Edge::new(u, v, round_sig(cost)));
                }
            }
        }
        if params.max_edges.is_some_and(|cap| edges.len() > cap) {
            continue;
        }
        let mut demands = Vec::with_capacity(params.q);
        for _ in 0..params.q {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let max_side = params.side_max.min(n / 2);
            let s = rng.gen_range(params.side_min..=max_side);
            let t = rng.gen_range(params.side_min..=max_side);
            let k = if params.mixed { rng.gen_range(1..=params.k) } else { params.k };
            demands.push(DemandPair::new(order[..s].to_vec(), order[s..s + t].to_vec(), k));
        }
        let inst = Instance::new(n, edges, demands).map_err(|e| HarnessError::Params(e.to_string()))?;
        let all = inst.all_edges();
        let ok = inst.demands().iter().all(|d| {
            set_pair_edge_connectivity(&inst, &all, d.sources(), d.sinks())
                .map(|c| c.at_least(d.requirement() as usize))
                .unwrap_or(false)
        });
        if ok {
            return Ok(inst);
        }
    }
    Err(HarnessError::Generation {
        n,
        density: params.density,
        q: params.q,
        k: params.k,
        attempts: params.max_attempts,
    })
}
