use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use super::partition::{bipartition, LocalEdge};
use super::{EmbeddingConfig, TreeEdge, TreeEmbedding, TreeNode};
use crate::graph::{CapacityMap, EdgeId, GraphError, Instance, VertexId};

/// Positive-capacity adjacency of the input graph.
struct Support<'a> {
    instance: &'a Instance,
    caps: &'a [f64],
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl<'a> Support<'a> {
    fn new(instance: &'a Instance, caps: &'a [f64]) -> Self {
        let mut adj = vec![Vec::new(); instance.n()];
        for (e, edge) in instance.edges().iter().enumerate() {
            if caps[e] > 0.0 {
                adj[edge.u].push((edge.v, e));
                adj[edge.v].push((edge.u, e));
            }
        }
        Support { instance, caps, adj }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Components of the support restricted to `cluster`, ordered by smallest member.
    fn components_within(&self, cluster: &[VertexId], inside: &[bool]) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for &s in cluster {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &(w, _) in &self.adj[v] {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Vertex with the largest capacity to the rest of the cluster; ties to the smallest id.
    fn heaviest(&self, cluster: &[VertexId], inside: &[bool]) -> VertexId {
        let mut best = (cluster[0], -1.0);
        for &v in cluster {
            let w: f64 = self.adj[v].iter().filter(|(u, _)| inside[*u]).map(|&(_, e)| self.caps[e]).sum();
            if w > best.1 {
                best = (v, w);
            }
        }
        best.0
    }

    fn local_edges(&self, cluster: &[VertexId], inside: &[bool]) -> Vec<LocalEdge> {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in cluster.iter().enumerate() {
            local[v] = i;
        }
        let mut out = Vec::new();
        for (e, edge) in self.instance.edges().iter().enumerate() {
            if self.caps[e] > 0.0 && inside[edge.u] && inside[edge.v] {
                out.push(LocalEdge {
                    u: local[edge.u],
                    v: local[edge.v],
                    cap: self.caps[e],
                });
            }
        }
        out
    }

    /// Cheapest support path under lengths `weights[e] / caps[e]`, restricted to `allowed`.
    fn shortest_path(&self, from: VertexId, to: VertexId, weights: &[f64], allowed: Option<&[bool]>) -> Option<Vec<EdgeId>> {
        #[derive(PartialEq)]
        struct Item(f64, VertexId);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        let ok = |v: VertexId| allowed.is_none_or(|a| a[v]);
        let mut dist = vec![f64::INFINITY; self.n()];
        let mut pred: Vec<Option<(VertexId, EdgeId)>> = vec![None; self.n()];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(Item(0.0, from));
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if v == to {
                break;
            }
            for &(w, e) in &self.adj[v] {
                if !ok(w) {
                    continue;
                }
                let nd = d + weights[e] / self.caps[e];
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = Some((v, e));
                    heap.push(Item(nd, w));
                }
            }
        }
        if !dist[to].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while let Some((u, e)) = pred[v] {
            path.push(e);
            v = u;
        }
        path.reverse();
        Some(path)
    }

    /// Support as a rooted forest, if it is one: per component its center and child lists.
    fn as_forest(&self) -> Option<(Vec<VertexId>, Vec<Vec<VertexId>>, usize)> {
        let n = self.n();
        let mut parent_of = vec![usize::MAX; n];
        let mut children = vec![Vec::new(); n];
        let mut centers = Vec::new();
        let mut seen = vec![false; n];
        let mut radius = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let comp = bfs_order(&self.adj, s, &mut seen);
            let edges_in: usize = comp.iter().map(|&v| self.adj[v].len()).sum::<usize>() / 2;
            if edges_in + 1 != comp.len() {
                return None;
            }
            let mut best = (usize::MAX, s);
            for &c in &comp {
                let ecc = eccentricity(&self.adj, c);
                if ecc < best.0 || (ecc == best.0 && c < best.1) {
                    best = (ecc, c);
                }
            }
            radius = radius.max(best.0);
            let center = best.1;
            centers.push(center);
            let mut queue = VecDeque::from([center]);
            parent_of[center] = center;
            while let Some(v) = queue.pop_front() {
                let mut kids: Vec<VertexId> = self.adj[v].iter().map(|&(w, _)| w).filter(|&w| parent_of[w] == usize::MAX).collect();
                kids.sort_unstable();
                for &w in &kids {
                    parent_of[w] = v;
                    queue.push_back(w);
                }
                children[v] = kids;
            }
        }
        Some((centers, children, radius))
    }
}

fn bfs_order(adj: &[Vec<(VertexId, EdgeId)>], s: VertexId, seen: &mut [bool]) -> Vec<VertexId> {
    seen[s] = true;
    let mut out = vec![s];
    let mut i = 0;
    while i < out.len() {
        let v = out[i];
        i += 1;
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                out.push(w);
            }
        }
    }
    out
}

fn eccentricity(adj: &[Vec<(VertexId, EdgeId)>], s: VertexId) -> usize {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut far = 0;
    while let Some(v) = queue.pop_front() {
        far = far.max(dist[v]);
        for &(w, _) in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// Cluster hierarchy before capacities and paths are attached.
struct Draft {
    clusters: Vec<Vec<VertexId>>,
    parent: Vec<Option<usize>>,
    rep: Vec<VertexId>,
    /// Whether the cluster is connected in the support restricted to itself.
    connected: Vec<bool>,
}

impl Draft {
    fn push(&mut self, cluster: Vec<VertexId>, parent: Option<usize>, rep: VertexId) -> usize {
        self.clusters.push(cluster);
        self.parent.push(parent);
        self.rep.push(rep);
        self.connected.push(true);
        self.clusters.len() - 1
    }

    fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.clusters.len()];
        for i in 1..self.clusters.len() {
            depth[i] = depth[self.parent[i].expect("non-root has a parent")] + 1;
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

fn mask(n: usize, cluster: &[VertexId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in cluster {
        m[v] = true;
    }
    m
}

fn general_draft<R: Rng + ?Sized>(support: &Support<'_>, config: &EmbeddingConfig, rng: &mut R) -> Draft {
    let n = support.n();
    let mut draft = Draft {
        clusters: Vec::new(),
        parent: Vec::new(),
        rep: Vec::new(),
        connected: Vec::new(),
    };
    let all: Vec<VertexId> = (0..n).collect();
    let root_rep = support.heaviest(&all, &vec![true; n]);
    draft.push(all, None, root_rep);
    let mut i = 0;
    while i < draft.clusters.len() {
        let cluster = draft.clusters[i].clone();
        i += 1;
        if cluster.len() == 1 {
            continue;
        }
        let inside = mask(n, &cluster);
        let mut parts = support.components_within(&cluster, &inside);
        if parts.len() > 1 {
            draft.connected[i - 1] = false;
        } else {
            let local = support.local_edges(&cluster, &inside);
            let side = bipartition(cluster.len(), &local, config.exact_partition_limit, rng);
            let (a, b): (Vec<_>, Vec<_>) = cluster.iter().zip(&side).partition(|(_, &s)| s);
            let sides: [Vec<VertexId>; 2] = [a.into_iter().map(|(&v, _)| v).collect(), b.into_iter().map(|(&v, _)| v).collect()];
            // A disconnected side is replaced by its components.
            parts = sides
                .into_iter()
                .flat_map(|s| {
                    let m = mask(n, &s);
                    support.components_within(&s, &m)
                })
                .collect();
            parts.sort();
        }
        let parent_rep = draft.rep[i - 1];
        for part in parts {
            let rep = if part.binary_search(&parent_rep).is_ok() {
                parent_rep
            } else {
                support.heaviest(&part, &mask(n, &part))
            };
            draft.push(part, Some(i - 1), rep);
        }
    }
    draft
}

fn forest_draft(support: &Support<'_>, height_bound: usize) -> Option<Draft> {
    let (centers, children, radius) = support.as_forest()?;
    let n = support.n();
    let extra = usize::from(centers.len() > 1);
    if radius + 1 + extra > height_bound {
        return None;
    }
    let mut subtree: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &c in &centers {
        let mut order = vec![c];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            order.extend(children[v].iter().copied());
        }
        for &v in order.iter().rev() {
            let mut s = vec![v];
            for &w in &children[v] {
                s.extend(subtree[w].iter().copied());
            }
            s.sort_unstable();
            subtree[v] = s;
        }
    }
    let mut draft = Draft {
        clusters: Vec::new(),
        parent: Vec::new(),
        rep: Vec::new(),
        connected: Vec::new(),
    };
    // Queue entries: (node index, vertex whose subtree the node stands for, or None for a plain leaf).
    let mut queue: VecDeque<(usize, Option<VertexId>)> = VecDeque::new();
    if centers.len() == 1 {
        let c = centers[0];
        queue.push_back((draft.push(subtree[c].clone(), None, c), Some(c)));
    } else {
        let root = draft.push((0..n).collect(), None, centers[0]);
        draft.connected[root] = false;
        for &c in &centers {
            queue.push_back((draft.push(subtree[c].clone(), Some(root), c), Some(c)));
        }
    }
    while let Some((node, vertex)) = queue.pop_front() {
        let Some(v) = vertex else { continue };
        if children[v].is_empty() {
            continue;
        }
        queue.push_back((draft.push(vec![v], Some(node), v), None));
        for &c in &children[v] {
            queue.push_back((draft.push(subtree[c].clone(), Some(node), c), Some(c)));
        }
    }
    Some(draft)
}

fn finalize(support: &Support<'_>, draft: Draft, weights: &[f64]) -> TreeEmbedding {
    let n = support.n();
    let count = draft.clusters.len();
    let mut nodes: Vec<TreeNode> = (0..count)
        .map(|i| TreeNode {
            parent_edge: None,
            children: Vec::new(),
            representative: draft.rep[i],
            cluster: draft.clusters[i].clone(),
            depth: 0,
        })
        .collect();
    let mut edges = Vec::with_capacity(count.saturating_sub(1));
    let mut masks: Vec<Option<Vec<bool>>> = vec![None; count];
    for i in 1..count {
        let p = draft.parent[i].expect("non-root has a parent");
        let inside = mask(n, &draft.clusters[i]);
        let capacity: f64 = support
            .instance
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| inside[e.u] != inside[e.v])
            .map(|(e, _)| support.caps[e])
            .sum();
        let (from, to) = (draft.rep[p], draft.rep[i]);
        let path = if from == to {
            Vec::new()
        } else {
            let allowed = if draft.connected[p] {
                Some(masks[p].get_or_insert_with(|| mask(n, &draft.clusters[p])).as_slice())
            } else {
                None
            };
            support.shortest_path(from, to, weights, allowed).unwrap_or_default()
        };
        let f = edges.len();
        edges.push(TreeEdge {
            parent: p,
            child: i,
            capacity,
            path,
        });
        nodes[i].parent_edge = Some(f);
        nodes[i].depth = nodes[p].depth + 1;
        nodes[p].children.push(f);
    }
    let mut leaf_of_vertex = vec![usize::MAX; n];
    for (i, node) in nodes.iter().enumerate() {
        if node.children.is_empty() {
            leaf_of_vertex[node.cluster[0]] = i;
        }
    }
    let height = nodes.iter().map(|v| v.depth).max().unwrap_or(0);
    TreeEmbedding {
        nodes,
        edges,
        leaf_of_vertex,
        height,
    }
}

/// One capacity-based tree embedding of `(G, caps)`.
///
/// Edge lengths for path mapping are `weights[e] / caps[e]`. When the positive
/// support is a forest of small enough radius the forest embeds into itself
/// (each vertex standing above a leaf copy of itself), which maps every tree
/// edge onto exactly one graph edge.
pub fn build_decomposition_tree<R: Rng + ?Sized>(
    instance: &Instance,
    caps: &CapacityMap,
    weights: &[f64],
    config: &EmbeddingConfig,
    rng: &mut R,
) -> Result<TreeEmbedding, GraphError> {
    let m = instance.edges().len();
    caps.check_for(instance)?;
    if weights.len() != m {
        return Err(GraphError::CapacityLength {
            got: weights.len(),
            expected: m,
        });
    }
    if let Some((e, &w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(GraphError::InvalidCapacity { edge: e, value: w });
    }
    if instance.n() == 0 {
        return Err(GraphError::InvalidArgument("graph has no vertices".into()));
    }
    let support = Support::new(instance, caps.as_slice());
    let draft = match forest_draft(&support, config.height_bound(instance.n())) {
        Some(d) => d,
        None => general_draft(&support, config, rng),
    };
    debug_assert!(draft.depth() >= usize::from(instance.n() > 1));
    Ok(finalize(&support, draft, weights))
}
