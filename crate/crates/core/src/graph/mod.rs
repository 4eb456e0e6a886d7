//! Graph data model: instances, demands, capacities and cut certificates.
//!
//! Every other module works on top of the [`Network`] trait, so the same flow
//! and component routines run on input graphs and on embedded trees alike.

mod connectivity;
mod flow;
mod reduce;

pub use connectivity::{connected_components, set_pair_edge_connectivity, Connectivity};
pub use flow::{cut_capacity, max_flow, FlowResult, FLOW_EPS};
pub use reduce::{reduce_to_uniform, UniformReduction};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("edge {edge}: endpoint {vertex} out of range for n = {n}")]
    EndpointOutOfRange { edge: EdgeId, vertex: VertexId, n: usize },
    #[error("edge {edge}: self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge}: cost {cost} is not a finite nonnegative number")]
    InvalidCost { edge: EdgeId, cost: f64 },
    #[error("demand {demand}: vertex {vertex} out of range for n = {n}")]
    DemandVertexOutOfRange { demand: usize, vertex: VertexId, n: usize },
    #[error("demand {demand}: {side} side is empty")]
    EmptyDemandSide { demand: usize, side: &'static str },
    #[error("demand {demand}: requirement must be at least 1")]
    ZeroRequirement { demand: usize },
    #[error("capacity map has {got} entries, expected {expected}")]
    CapacityLength { got: usize, expected: usize },
    #[error("capacity of edge {edge} is {value}, expected a finite nonnegative number")]
    InvalidCapacity { edge: EdgeId, value: f64 },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge id {edge} out of range for {m} edges")]
    EdgeOutOfRange { edge: EdgeId, m: usize },
}

/// Anything with a vertex count and an indexed list of undirected edges.
pub trait Network {
    fn vertex_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId);
}

/// A bare undirected multigraph, used for auxiliary networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub ends: Vec<(VertexId, VertexId)>,
}

impl Network for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn edge_count(&self) -> usize {
        self.ends.len()
    }
    fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[e]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: f64,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, cost: f64) -> Self {
        Edge { u, v, cost }
    }

    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A set-pair demand `(S, T)` asking for `requirement` edge-disjoint paths.
///
/// Both sides are stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandPair {
    sources: Vec<VertexId>,
    sinks: Vec<VertexId>,
    requirement: u32,
}

impl DemandPair {
    pub fn new(sources: Vec<VertexId>, sinks: Vec<VertexId>, requirement: u32) -> Self {
        DemandPair {
            sources: normalize(sources),
            sinks: normalize(sinks),
            requirement,
        }
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn sinks(&self) -> &[VertexId] {
        &self.sinks
    }

    pub fn requirement(&self) -> u32 {
        self.requirement
    }

    /// True when `S ∩ T ≠ ∅`; such demands are satisfied at every level.
    pub fn is_degenerate(&self) -> bool {
        sorted_intersects(&self.sources, &self.sinks)
    }
}

/// Sort and deduplicate a vertex list.
pub fn normalize(mut set: Vec<VertexId>) -> Vec<VertexId> {
    set.sort_unstable();
    set.dedup();
    set
}

pub(crate) fn sorted_intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// A Group EC-SNDP instance: costed undirected multigraph plus set-pair demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    n: usize,
    edges: Vec<Edge>,
    demands: Vec<DemandPair>,
}

impl Instance {
    pub fn new(n: usize, edges: Vec<Edge>, demands: Vec<DemandPair>) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            for w in [e.u, e.v] {
                if w >= n {
                    return Err(GraphError::EndpointOutOfRange { edge: i, vertex: w, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { edge: i, vertex: e.u });
            }
            if !(e.cost.is_finite() && e.cost >= 0.0) {
                return Err(GraphError::InvalidCost { edge: i, cost: e.cost });
            }
        }
        for (i, d) in demands.iter().enumerate() {
            if d.sources.is_empty() {
                return Err(GraphError::EmptyDemandSide { demand: i, side: "S" });
            }
            if d.sinks.is_empty() {
                return Err(GraphError::EmptyDemandSide { demand: i, side: "T" });
            }
            if d.requirement == 0 {
                return Err(GraphError::ZeroRequirement { demand: i });
            }
            if let Some(&w) = d.sources.iter().chain(&d.sinks).find(|&&w| w >= n) {
                return Err(GraphError::DemandVertexOutOfRange { demand: i, vertex: w, n });
            }
        }
        Ok(Instance { n, edges, demands })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn demands(&self) -> &[DemandPair] {
        &self.demands
    }

    pub fn costs(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    /// Largest requirement over all demands (0 without demands).
    pub fn max_requirement(&self) -> u32 {
        self.demands.iter().map(|d| d.requirement).max().unwrap_or(0)
    }

    pub fn has_uniform_requirements(&self) -> bool {
        let k = self.max_requirement();
        self.demands.iter().all(|d| d.requirement == k)
    }

    pub fn cost_of(&self, edges: &[EdgeId]) -> f64 {
        edges.iter().map(|&e| self.edges[e].cost).sum()
    }

    pub fn all_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len()).collect()
    }

    /// True when every demand has at least its own requirement of edge-disjoint paths in `h`.
    pub fn is_feasible(&self, h: &[EdgeId]) -> bool {
        self.demands
            .iter()
            .all(|d| connectivity::meets(self, h, &d.sources, &d.sinks, d.requirement as usize))
    }

    /// Index of the first demand with fewer than `min(k, k_i)` edge-disjoint paths in `h`.
    pub fn first_deficient(&self, h: &[EdgeId], k: usize) -> Option<usize> {
        self.demands.iter().position(|d| {
            let need = k.min(d.requirement as usize);
            !connectivity::meets(self, h, &d.sources, &d.sinks, need)
        })
    }
}

impl Network for Instance {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn edge_count(&self) -> usize {
        self.edges.len()
    }
    fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let edge = &self.edges[e];
        (edge.u, edge.v)
    }
}

/// Per-edge nonnegative capacities, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityMap(Vec<f64>);

impl CapacityMap {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some((edge, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(GraphError::InvalidCapacity { edge, value });
        }
        Ok(CapacityMap(values))
    }

    pub fn uniform(m: usize, value: f64) -> Self {
        CapacityMap::new(vec![value; m]).expect("uniform capacity must be finite and nonnegative")
    }

    /// Capacity 1 on the listed edges and 0 elsewhere.
    pub fn indicator(m: usize, edges: &[EdgeId]) -> Self {
        let mut values = vec![0.0; m];
        for &e in edges {
            values[e] = 1.0;
        }
        CapacityMap(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.0[e]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub(crate) fn check_for<N: Network>(&self, net: &N) -> Result<(), GraphError> {
        if self.0.len() != net.edge_count() {
            return Err(GraphError::CapacityLength {
                got: self.0.len(),
                expected: net.edge_count(),
            });
        }
        Ok(())
    }
}

/// A vertex cut `(X, V∖X)` together with its crossing edges and capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub side: Vec<VertexId>,
    pub crossing: Vec<EdgeId>,
    pub capacity: f64,
}

impl CutCertificate {
    /// Build the certificate for side `X` under `caps`.
    pub fn for_side<N: Network>(net: &N, caps: &CapacityMap, side: Vec<VertexId>) -> Self {
        let mut in_side = vec![false; net.vertex_count()];
        for &w in &side {
            in_side[w] = true;
        }
        let crossing: Vec<EdgeId> = (0..net.edge_count())
            .filter(|&e| {
                let (u, v) = net.endpoints(e);
                in_side[u] != in_side[v]
            })
            .collect();
        let capacity = crossing.iter().map(|&e| caps.get(e)).sum();
        CutCertificate {
            side: normalize(side),
            crossing,
            capacity,
        }
    }
}

/// Edges with exactly one endpoint in `side`, in edge-id order.
pub fn boundary_edges<N: Network>(net: &N, side: &[VertexId]) -> Vec<EdgeId> {
    let mut in_side = vec![false; net.vertex_count()];
    for &w in side {
        in_side[w] = true;
    }
    (0..net.edge_count())
        .filter(|&e| {
            let (u, v) = net.endpoints(e);
            in_side[u] != in_side[v]
        })
        .collect()
}

pub(crate) fn check_vertices(n: usize, set: &[VertexId]) -> Result<(), GraphError> {
    match set.iter().find(|&&w| w >= n) {
        Some(&vertex) => Err(GraphError::VertexOutOfRange { vertex, n }),
        None => Ok(()),
    }
}

pub(crate) fn check_edges(m: usize, set: &[EdgeId]) -> Result<(), GraphError> {
    match set.iter().find(|&&e| e >= m) {
        Some(&edge) => Err(GraphError::EdgeOutOfRange { edge, m }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_bad_costs() {
        let err = Instance::new(2, vec![Edge::new(1, 1, 1.0)], vec![]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { edge: 0, vertex: 1 });
        let err = Instance::new(2, vec![Edge::new(0, 1, -1.0)], vec![]).unwrap_err();
        assert!(matches!(err, GraphError::InvalidCost { edge: 0, .. }));
        let err = Instance::new(2, vec![Edge::new(0, 2, 1.0)], vec![]).unwrap_err();
        assert!(matches!(err, GraphError::EndpointOutOfRange { vertex: 2, .. }));
    }

    #[test]
    fn rejects_bad_demands() {
        let edges = vec![Edge::new(0, 1, 1.0)];
        let err = Instance::new(2, edges.clone(), vec![DemandPair::new(vec![], vec![1], 1)]).unwrap_err();
        assert_eq!(err, GraphError::EmptyDemandSide { demand: 0, side: "S" });
        let err = Instance::new(2, edges.clone(), vec![DemandPair::new(vec![0], vec![1], 0)]).unwrap_err();
        assert_eq!(err, GraphError::ZeroRequirement { demand: 0 });
        let err = Instance::new(2, edges, vec![DemandPair::new(vec![0], vec![5], 1)]).unwrap_err();
        assert!(matches!(err, GraphError::DemandVertexOutOfRange { vertex: 5, .. }));
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let inst = Instance::new(
            2,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)],
            vec![DemandPair::new(vec![0], vec![1], 2)],
        )
        .unwrap();
        assert_eq!(inst.edge_count(), 2);
        assert_eq!(inst.cost_of(&[0, 1]), 3.0);
    }

    #[test]
    fn cut_certificate_sums_crossing_edges() {
        let g = SimpleGraph {
            n: 3,
            ends: vec![(0, 1), (1, 2), (0, 2)],
        };
        let caps = CapacityMap::new(vec![1.0, 2.0, 4.0]).unwrap();
        let cut = CutCertificate::for_side(&g, &caps, vec![0]);
        assert_eq!(cut.crossing, vec![0, 2]);
        assert_eq!(cut.capacity, 5.0);
    }

    #[test]
    fn capacity_map_rejects_nan_and_negative() {
        assert!(CapacityMap::new(vec![0.0, f64::NAN]).is_err());
        assert!(CapacityMap::new(vec![-0.5]).is_err());
    }
}
