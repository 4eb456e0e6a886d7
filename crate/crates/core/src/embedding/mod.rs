//! Capacity capping and capacity-based tree embeddings.
//!
//! A [`TreeEmbedding`] `(T, M, y)` is a rooted tree whose leaves are the graph
//! vertices. Every tree node maps to a representative vertex, every tree edge
//! maps to a graph path between the representatives of its endpoints, and the
//! capacity of a tree edge is the capped capacity of the graph cut induced by
//! the leaves below it. Because capacities are exact cut values, max-flow in
//! any such tree dominates max-flow in the graph.
//!
//! The trees are built by recursive bipartition of clusters (exact for small
//! clusters, spectral sweep otherwise). A distribution over several trees is
//! grown with multiplicative weights on path lengths so that later trees route
//! around edges that earlier trees loaded heavily. Its congestion `β` is
//! measured, not assumed.

mod capping;
mod decomposition;
mod distribution;
mod export;
mod partition;

pub use capping::{cap_capacities, capping_threshold, CappedCapacities};
pub use decomposition::build_decomposition_tree;
pub use distribution::{
    build_distribution, fix_point_beta, initial_beta, measure_congestion, BetaFixPoint, CongestionTable,
    TreeDistribution,
};
pub use export::{rload_csv, to_dot};

use serde::{Deserialize, Serialize};

use crate::graph::{CapacityMap, EdgeId, Network, VertexId};

pub type NodeId = usize;
pub type TreeEdgeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub parent_edge: Option<TreeEdgeId>,
    pub children: Vec<TreeEdgeId>,
    pub representative: VertexId,
    /// Graph vertices of the leaves below this node, sorted.
    pub cluster: Vec<VertexId>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: NodeId,
    pub child: NodeId,
    /// `y(f)`: capped capacity of `δ(cluster(child))`.
    pub capacity: f64,
    /// `M(f)`: graph edges from `M(parent)` to `M(child)`, in walk order.
    pub path: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEmbedding {
    nodes: Vec<TreeNode>,
    edges: Vec<TreeEdge>,
    leaf_of_vertex: Vec<NodeId>,
    height: usize,
}

impl TreeEmbedding {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, v: NodeId) -> &TreeNode {
        &self.nodes[v]
    }

    pub fn tree_edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn tree_edge(&self, f: TreeEdgeId) -> &TreeEdge {
        &self.edges[f]
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of graph vertices (= number of leaves).
    pub fn graph_vertex_count(&self) -> usize {
        self.leaf_of_vertex.len()
    }

    /// `M⁻¹(v)`: the leaf of graph vertex `v`.
    pub fn leaf(&self, v: VertexId) -> NodeId {
        self.leaf_of_vertex[v]
    }

    pub fn leaves_of(&self, vertices: &[VertexId]) -> Vec<NodeId> {
        vertices.iter().map(|&v| self.leaf_of_vertex[v]).collect()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_empty()
    }

    /// Graph vertex of a leaf node.
    pub fn vertex_of_leaf(&self, v: NodeId) -> Option<VertexId> {
        self.is_leaf(v).then(|| self.nodes[v].representative)
    }

    /// Tree-edge capacities `y` as a capacity map over tree edges.
    pub fn capacities(&self) -> CapacityMap {
        CapacityMap::new(self.edges.iter().map(|f| f.capacity).collect()).expect("tree capacities are valid")
    }

    /// `M⁻¹(F)`: tree edges whose path uses an edge of `f`, sorted.
    pub fn preimage(&self, f: &[EdgeId]) -> Vec<TreeEdgeId> {
        let mut hit = std::collections::BTreeSet::new();
        for &e in f {
            hit.insert(e);
        }
        (0..self.edges.len())
            .filter(|&t| self.edges[t].path.iter().any(|e| hit.contains(e)))
            .collect()
    }

    /// `load_T(e) = Σ_{f : e ∈ M(f)} y(f)` for every graph edge.
    pub fn loads(&self, graph_edges: usize) -> Vec<f64> {
        let mut load = vec![0.0; graph_edges];
        for f in &self.edges {
            for &e in &f.path {
                load[e] += f.capacity;
            }
        }
        load
    }

    /// Union of `M(f)` over the given tree edges, sorted and deduplicated.
    pub fn map_edges(&self, tree_edges: impl IntoIterator<Item = TreeEdgeId>) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = tree_edges
            .into_iter()
            .flat_map(|f| self.edges[f].path.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Tree edges under the subtree rooted at `v`, in BFS order from `v`.
    pub fn subtree_edges(&self, v: NodeId) -> Vec<TreeEdgeId> {
        let mut out = Vec::new();
        let mut frontier = vec![v];
        let mut i = 0;
        while i < frontier.len() {
            let u = frontier[i];
            i += 1;
            for &f in &self.nodes[u].children {
                out.push(f);
                frontier.push(self.edges[f].child);
            }
        }
        out
    }

    /// Tree edges whose mapped path is missing even though the endpoint
    /// representatives differ. These only occur between separate components
    /// of the capacity support and always carry `y = 0`.
    pub fn detached_edges(&self) -> Vec<TreeEdgeId> {
        (0..self.edges.len())
            .filter(|&f| {
                let t = &self.edges[f];
                t.path.is_empty() && self.nodes[t.parent].representative != self.nodes[t.child].representative
            })
            .collect()
    }
}

impl Network for TreeEmbedding {
    fn vertex_count(&self) -> usize {
        self.nodes.len()
    }
    fn edge_count(&self) -> usize {
        self.edges.len()
    }
    fn endpoints(&self, f: TreeEdgeId) -> (VertexId, VertexId) {
        (self.edges[f].parent, self.edges[f].child)
    }
}

/// Tunables for tree construction and the weighted distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    /// Trees per distribution; `None` means `ceil(8 · log2 n)`.
    pub num_trees: Option<usize>,
    pub eps_mwu: f64,
    /// `c_h` in the height bound `ceil(c_h · log2(2n³))`.
    pub height_factor: f64,
    /// Clusters up to this size are bipartitioned by exhaustive search.
    pub exact_partition_limit: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            num_trees: None,
            eps_mwu: 0.5,
            height_factor: 4.0,
            exact_partition_limit: 12,
        }
    }
}

impl EmbeddingConfig {
    pub fn trees_for(&self, n: usize) -> usize {
        self.num_trees
            .unwrap_or_else(|| (8.0 * (n.max(2) as f64).log2()).ceil() as usize)
            .max(1)
    }

    pub fn height_bound(&self, n: usize) -> usize {
        height_bound(self.height_factor, n)
    }
}

/// `ceil(c_h · log2(2n³))`.
pub fn height_bound(height_factor: f64, n: usize) -> usize {
    let n = n.max(1) as f64;
    (height_factor * (2.0 * n * n * n).log2()).ceil() as usize
}
