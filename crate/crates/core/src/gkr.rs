//! Dependent top-down rounding on rooted trees.
//!
//! Every edge carries a working capacity `ŷ` that never increases along a
//! root-to-leaf path. Edges are visited parent before child; an edge whose
//! parent edge was kept is kept with probability `ŷ(f) / ŷ(parent)`, so its
//! marginal probability telescopes to exactly `ŷ(f)`. The kept edges always
//! form a subtree hanging from the root.

use rand::Rng;
use thiserror::Error;

use crate::embedding::{NodeId, TreeEdgeId, TreeEmbedding};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundingError {
    #[error("node {node}: parent {parent} must precede it")]
    ParentOrder { node: usize, parent: usize },
    #[error("node {node}: capacity {value} is not a finite nonnegative number")]
    InvalidCapacity { node: usize, value: f64 },
    #[error("rounding tree needs exactly one root (node 0)")]
    Root,
    #[error("node {0} is not a leaf of the rounding tree")]
    NotALeaf(NodeId),
    #[error("invalid rounding parameter: {0}")]
    InvalidConfig(String),
}

/// A rooted tree with clipped working capacities, stored in topological order.
///
/// Local index 0 is the root. For a local index `i > 0`, `parent[i] < i` and
/// `capacity[i]` is `ŷ` of the edge from the parent into `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingTree {
    nodes: Vec<NodeId>,
    parent: Vec<usize>,
    edge: Vec<TreeEdgeId>,
    capacity: Vec<f64>,
    is_leaf: Vec<bool>,
}

impl RoundingTree {
    /// The subtree of `tree` rooted at `root`, with `ŷ(f) = min(1, scale · y(f), ŷ(parent))`.
    pub fn from_embedding(tree: &TreeEmbedding, root: NodeId, scale: f64) -> Self {
        let mut nodes = vec![root];
        let mut parent = vec![0];
        let mut edge = vec![usize::MAX];
        let mut capacity = vec![1.0];
        let mut i = 0;
        while i < nodes.len() {
            let v = nodes[i];
            for &f in &tree.node(v).children {
                let t = tree.tree_edge(f);
                nodes.push(t.child);
                parent.push(i);
                edge.push(f);
                capacity.push((scale * t.capacity).min(1.0).min(capacity[i]));
            }
            i += 1;
        }
        let is_leaf = nodes.iter().map(|&v| tree.is_leaf(v)).collect();
        RoundingTree {
            nodes,
            parent,
            edge,
            capacity,
            is_leaf,
        }
    }

    /// A standalone tree: node `i` has parent `parents[i - 1]` and raw capacity
    /// `capacities[i - 1]`; the edge into node `i` has id `i - 1`. Capacities
    /// are clipped top-down like scaled embedding capacities.
    pub fn from_parts(parents: &[usize], capacities: &[f64]) -> Result<Self, RoundingError> {
        if parents.len() != capacities.len() {
            return Err(RoundingError::InvalidConfig("parents and capacities differ in length".into()));
        }
        let k = parents.len() + 1;
        let mut parent = vec![0];
        let mut capacity = vec![1.0];
        let mut has_child = vec![false; k];
        for (j, (&p, &c)) in parents.iter().zip(capacities).enumerate() {
            let node = j + 1;
            if p >= node {
                return Err(RoundingError::ParentOrder { node, parent: p });
            }
            if !(c.is_finite() && c >= 0.0) {
                return Err(RoundingError::InvalidCapacity { node, value: c });
            }
            parent.push(p);
            capacity.push(c.min(1.0).min(capacity[p]));
            has_child[p] = true;
        }
        Ok(RoundingTree {
            nodes: (0..k).collect(),
            parent,
            edge: std::iter::once(usize::MAX).chain(0..k - 1).collect(),
            capacity,
            is_leaf: has_child.iter().map(|&h| !h).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.nodes[0]
    }

    /// Node ids in topological (parent-first) order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// `(tree edge, ŷ)` for every edge, in topological order.
    pub fn edges(&self) -> impl Iterator<Item = (TreeEdgeId, f64)> + '_ {
        (1..self.len()).map(|i| (self.edge[i], self.capacity[i]))
    }

    /// Leaf node ids of the view.
    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&i| self.is_leaf[i]).map(|i| self.nodes[i]).collect()
    }

    fn conditional(&self, i: usize) -> f64 {
        let p = self.capacity[self.parent[i]];
        if p <= 0.0 {
            0.0
        } else {
            (self.capacity[i] / p).min(1.0)
        }
    }

    /// Nodes reached by one rounding, indexed by local position.
    pub fn sample_reached<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let mut reached = vec![false; self.len()];
        reached[0] = true;
        for i in 1..self.len() {
            if !reached[self.parent[i]] {
                continue;
            }
            let p = self.conditional(i);
            reached[i] = if p >= 1.0 {
                true
            } else if p <= 0.0 {
                false
            } else {
                rng.gen::<f64>() < p
            };
        }
        reached
    }

    fn local_indices(&self, group: &[NodeId]) -> Result<Vec<bool>, RoundingError> {
        let mut in_group = vec![false; self.len()];
        for &g in group {
            let i = self.nodes.iter().position(|&v| v == g).ok_or(RoundingError::NotALeaf(g))?;
            if !self.is_leaf[i] {
                return Err(RoundingError::NotALeaf(g));
            }
            in_group[i] = true;
        }
        Ok(in_group)
    }
}

/// One dependent rounding; returns the kept tree edges in topological order.
pub fn round_gkr<R: Rng + ?Sized>(tree: &RoundingTree, rng: &mut R) -> Vec<TreeEdgeId> {
    let reached = tree.sample_reached(rng);
    debug_assert!((1..tree.len()).all(|i| !reached[i] || reached[tree.parent[i]]));
    (1..tree.len()).filter(|&i| reached[i]).map(|i| tree.edge[i]).collect()
}

/// Exact probability that one rounding reaches at least one leaf of `group`.
///
/// Bottom-up: `miss(v)` is the probability that no group leaf below `v` is
/// reached given `v` is reached, and children contribute independently:
/// `miss(v) = Π_c (1 − r_c + r_c · miss(c))` with `r_c` the conditional keep
/// probability of the edge into `c`.
pub fn exact_connect_probability(tree: &RoundingTree, group: &[NodeId]) -> Result<f64, RoundingError> {
    let in_group = tree.local_indices(group)?;
    let mut miss = vec![1.0; tree.len()];
    for i in (0..tree.len()).rev() {
        if in_group[i] {
            miss[i] = 0.0;
        }
        if i > 0 {
            let r = tree.conditional(i);
            miss[tree.parent[i]] *= 1.0 - r + r * miss[i];
        }
    }
    Ok(1.0 - miss[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star(m: usize) -> RoundingTree {
        RoundingTree::from_parts(&vec![0; m], &vec![1.0 / m as f64; m]).unwrap()
    }

    #[test]
    fn single_full_edge_always_kept() {
        let t = RoundingTree::from_parts(&[0], &[1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(round_gkr(&t, &mut rng), vec![0]);
        }
    }

    #[test]
    fn zero_capacities_keep_nothing() {
        let t = RoundingTree::from_parts(&[0, 0, 1], &[0.0, 0.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(round_gkr(&t, &mut rng).is_empty());
        assert_eq!(exact_connect_probability(&t, &[2, 3]).unwrap(), 0.0);
    }

    #[test]
    fn star_probability_closed_form() {
        for m in [2usize, 3, 5] {
            let t = star(m);
            let leaves: Vec<usize> = (1..=m).collect();
            let p = exact_connect_probability(&t, &leaves).unwrap();
            let closed = 1.0 - (1.0 - 1.0 / m as f64).powi(m as i32);
            assert!((p - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_is_product_of_conditionals() {
        let t = RoundingTree::from_parts(&[0, 1], &[1.0, 0.5]).unwrap();
        assert!((exact_connect_probability(&t, &[2]).unwrap() - 0.5).abs() < 1e-15);
        let t = RoundingTree::from_parts(&[0], &[0.3]).unwrap();
        assert!((exact_connect_probability(&t, &[1]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn clipping_is_monotone() {
        let t = RoundingTree::from_parts(&[0, 1, 1], &[0.4, 2.0, 0.1]).unwrap();
        let caps: Vec<f64> = t.edges().map(|(_, c)| c).collect();
        assert_eq!(caps, vec![0.4, 0.4, 0.1]);
    }

    #[test]
    fn group_must_be_leaves() {
        let t = RoundingTree::from_parts(&[0, 1], &[1.0, 1.0]).unwrap();
        assert_eq!(exact_connect_probability(&t, &[1]), Err(RoundingError::NotALeaf(1)));
        assert!(RoundingTree::from_parts(&[1], &[1.0]).is_err());
    }

    #[test]
    fn full_path_to_group_gives_certainty() {
        let t = RoundingTree::from_parts(&[0, 1, 0], &[1.0, 1.0, 0.2]).unwrap();
        assert_eq!(exact_connect_probability(&t, &[2, 3]).unwrap(), 1.0);
    }

    #[test]
    fn marginals_match_capacities() {
        let t = RoundingTree::from_parts(&[0, 0, 1, 1, 2, 4], &[0.7, 0.5, 0.6, 0.2, 0.25, 0.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let trials = 40_000;
        let mut hits = vec![0usize; 6];
        for _ in 0..trials {
            for f in round_gkr(&t, &mut rng) {
                hits[f] += 1;
            }
        }
        for (f, c) in t.edges() {
            let freq = hits[f] as f64 / trials as f64;
            let se = (c * (1.0 - c) / trials as f64).sqrt().max(1e-9);
            assert!((freq - c).abs() <= 4.0 * se, "edge {f}: {freq} vs {c}");
        }
    }

    fn arb_tree() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
        (1usize..10).prop_flat_map(|k| {
            let parents: Vec<BoxedStrategy<usize>> = (1..=k).map(|i| (0..i).boxed()).collect();
            (parents, proptest::collection::vec(0.0f64..1.0, k))
        })
    }

    proptest! {
        #[test]
        fn output_is_rooted_subtree((parents, caps) in arb_tree(), seed in any::<u64>()) {
            let t = RoundingTree::from_parts(&parents, &caps).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kept = round_gkr(&t, &mut rng);
            let mut reached = vec![false; parents.len() + 1];
            reached[0] = true;
            for f in kept {
                let child = f + 1;
                prop_assert!(reached[parents[f]]);
                reached[child] = true;
            }
        }

        #[test]
        fn probability_monotone_in_capacity((parents, caps) in arb_tree(), j in any::<prop::sample::Index>(), bump in 0.0f64..0.5) {
            let t = RoundingTree::from_parts(&parents, &caps).unwrap();
            let leaves = t.leaves();
            let p = exact_connect_probability(&t, &leaves).unwrap();
            let mut raised = caps.clone();
            let j = j.index(raised.len());
            raised[j] = (raised[j] + bump).min(1.0);
            let t2 = RoundingTree::from_parts(&parents, &raised).unwrap();
            let p2 = exact_connect_probability(&t2, &leaves).unwrap();
            prop_assert!(p2 >= p - 1e-12);
        }
    }
}
