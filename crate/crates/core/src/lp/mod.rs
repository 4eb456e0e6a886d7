//! The cut-based augmentation LP, solved through its compact flow form.
//!
//! For requirement `k = ℓ + 1` the LP asks for `x(δ(X)) ≥ k` on every cut
//! separating a demand. By max-flow/min-cut this is the same as asking, for
//! each demand separately, for a flow of value `k` from `S_i` to `T_i` whose
//! per-edge usage is bounded by the shared `x_e`. That formulation has
//! polynomially many rows and is what gets handed to the simplex.

mod dump;
pub mod simplex;

pub use dump::to_lp_format;
pub use simplex::{LinearProgram, LpSolution, Relation, SimplexError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    max_flow, normalize, set_pair_edge_connectivity, CapacityMap, CutCertificate, EdgeId, GraphError, Instance,
};

/// Default feasibility tolerance used when checking LP output.
pub const LP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("demand {demand} cannot reach requirement {requirement} even with every edge (cut capacity {})", cut.capacity)]
    Infeasible {
        demand: usize,
        requirement: usize,
        cut: CutCertificate,
    },
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The augmentation LP at level `ℓ`: requirement `ℓ + 1`, bought edges free.
#[derive(Debug, Clone)]
pub struct AugmentationLp<'a> {
    pub instance: &'a Instance,
    pub level: usize,
    pub requirement: usize,
    pub zero_cost: Vec<EdgeId>,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

pub fn build_augmentation_lp<'a>(instance: &'a Instance, bought: &[EdgeId], level: usize) -> AugmentationLp<'a> {
    let zero_cost = normalize(bought.to_vec());
    let mut costs = instance.costs();
    for &e in &zero_cost {
        costs[e] = 0.0;
    }
    AugmentationLp {
        instance,
        level,
        requirement: level + 1,
        zero_cost,
        costs,
    }
}

impl AugmentationLp<'_> {
    /// The flow formulation as a generic linear program.
    ///
    /// Variables `0..m` are the edge values `x_e`; flow variables follow,
    /// two per usable edge and demand.
    pub fn to_linear_program(&self) -> LinearProgram {
        let inst = self.instance;
        let m = inst.edges().len();
        let n = inst.n();
        let mut lp = LinearProgram::new(m);
        lp.objective = self.costs.clone();
        lp.var_names = (0..m).map(|e| format!("x{e}")).collect();
        for (i, d) in inst.demands().iter().enumerate() {
            if d.is_degenerate() {
                continue;
            }
            // 0 = source, 1 = sink, 2.. = other vertices
            let mut label = vec![usize::MAX; n];
            for &w in d.sources() {
                label[w] = 0;
            }
            for &w in d.sinks() {
                label[w] = 1;
            }
            let mut conservation: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
            let mut source_out: Vec<(usize, f64)> = Vec::new();
            let node = |w: usize, label: &[usize]| if label[w] == usize::MAX { 2 + w } else { label[w] };
            for (e, edge) in inst.edges().iter().enumerate() {
                let (a, b) = (node(edge.u, &label), node(edge.v, &label));
                if a == b {
                    continue;
                }
                let fwd = lp.num_vars;
                let bwd = fwd + 1;
                lp.num_vars += 2;
                lp.objective.extend([0.0, 0.0]);
                lp.var_names.push(format!("f{i}_{e}_p"));
                lp.var_names.push(format!("f{i}_{e}_m"));
                lp.add_row(vec![(fwd, 1.0), (bwd, 1.0), (e, -1.0)], Relation::Le, 0.0);
                // fwd carries a -> b, bwd carries b -> a
                for (from, to, var) in [(a, b, fwd), (b, a, bwd)] {
                    if from == 0 {
                        source_out.push((var, 1.0));
                    } else if from >= 2 {
                        conservation[from - 2].push((var, -1.0));
                    }
                    if to == 0 {
                        source_out.push((var, -1.0));
                    } else if to >= 2 {
                        conservation[to - 2].push((var, 1.0));
                    }
                }
            }
            for row in conservation.into_iter().filter(|r| !r.is_empty()) {
                lp.add_row(row, Relation::Eq, 0.0);
            }
            lp.add_row(source_out, Relation::Ge, self.requirement as f64);
        }
        for e in 0..m {
            lp.add_row(vec![(e, 1.0)], Relation::Le, 1.0);
        }
        lp
    }
}

/// Solve the augmentation LP.
///
/// Infeasibility is detected before the solve by checking each demand's
/// connectivity with every edge available. Edges of zero effective cost
/// (the bought set among them) are raised to `x_e = 1` afterwards.
pub fn solve_fractional(lp: &AugmentationLp<'_>, tolerance: f64) -> Result<FractionalSolution, LpError> {
    let inst = lp.instance;
    let all = inst.all_edges();
    for (i, d) in inst.demands().iter().enumerate() {
        let c = set_pair_edge_connectivity(inst, &all, d.sources(), d.sinks())?;
        if !c.at_least(lp.requirement) {
            let flow = max_flow(inst, &CapacityMap::uniform(all.len(), 1.0), d.sources(), d.sinks())?;
            return Err(LpError::Infeasible {
                demand: i,
                requirement: lp.requirement,
                cut: flow.cut,
            });
        }
    }
    let m = inst.edges().len();
    let program = lp.to_linear_program();
    let solution = program.solve()?;
    let mut x: Vec<f64> = solution.x[..m]
        .iter()
        .map(|&v| if v < tolerance.min(1e-12) { 0.0 } else { v.min(1.0) })
        .collect();
    for (e, value) in x.iter_mut().enumerate() {
        if lp.costs[e] == 0.0 {
            *value = 1.0;
        }
    }
    let objective = x.iter().zip(&lp.costs).map(|(a, c)| a * c).sum();
    Ok(FractionalSolution { x, objective })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandVerdict {
    pub demand: usize,
    /// `None` for demands with intersecting sides.
    pub flow: Option<f64>,
    pub violated: Option<CutCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub requirement: usize,
    pub demands: Vec<DemandVerdict>,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.demands.iter().all(|d| d.violated.is_none())
    }
}

/// Separation oracle: max-flow per demand under capacities `min(x_e, 1)`.
pub fn verify_lp_feasibility(
    instance: &Instance,
    x: &[f64],
    requirement: usize,
    tolerance: f64,
) -> Result<FeasibilityReport, GraphError> {
    let caps = CapacityMap::new(x.iter().map(|&v| v.clamp(0.0, 1.0)).collect())?;
    let mut demands = Vec::with_capacity(instance.demands().len());
    for (i, d) in instance.demands().iter().enumerate() {
        if d.is_degenerate() {
            demands.push(DemandVerdict {
                demand: i,
                flow: None,
                violated: None,
            });
            continue;
        }
        let r = max_flow(instance, &caps, d.sources(), d.sinks())?;
        let violated = (r.value < requirement as f64 - tolerance).then_some(r.cut);
        demands.push(DemandVerdict {
            demand: i,
            flow: Some(r.value),
            violated,
        });
    }
    Ok(FeasibilityReport { requirement, demands })
}
