use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{check_edges, check_vertices, normalize, sorted_intersects, EdgeId, GraphError, Network, VertexId};

/// Vertex partition induced by `edge_subset`, components ordered by smallest member.
pub fn connected_components<N: Network>(net: &N, edge_subset: &[EdgeId]) -> Vec<Vec<VertexId>> {
    let n = net.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in edge_subset {
        let (u, v) = net.endpoints(e);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut comps: Vec<Vec<VertexId>> = Vec::new();
    for w in 0..n {
        let r = find(&mut parent, w);
        if label[r] == usize::MAX {
            label[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[label[r]].push(w);
    }
    comps
}

/// Number of edge-disjoint `S–T` paths, or `Unbounded` when the sides meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connectivity {
    Finite(usize),
    Unbounded,
}

impl Connectivity {
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Connectivity::Finite(c) => c >= k,
            Connectivity::Unbounded => true,
        }
    }
}

/// Edge-disjoint path count between `S` and `T` using only edges of `h`.
pub fn set_pair_edge_connectivity<N: Network>(
    net: &N,
    h: &[EdgeId],
    sources: &[VertexId],
    sinks: &[VertexId],
) -> Result<Connectivity, GraphError> {
    unit_paths(net, h, sources, sinks, usize::MAX)
}

/// Like [`set_pair_edge_connectivity`] but stops counting once `limit` paths are found.
pub(crate) fn unit_paths<N: Network>(
    net: &N,
    h: &[EdgeId],
    sources: &[VertexId],
    sinks: &[VertexId],
    limit: usize,
) -> Result<Connectivity, GraphError> {
    let n = net.vertex_count();
    check_vertices(n, sources)?;
    check_vertices(n, sinks)?;
    check_edges(net.edge_count(), h)?;
    let s_set = normalize(sources.to_vec());
    let t_set = normalize(sinks.to_vec());
    if sorted_intersects(&s_set, &t_set) {
        return Ok(Connectivity::Unbounded);
    }
    if s_set.is_empty() || t_set.is_empty() {
        return Ok(Connectivity::Finite(0));
    }
    let (s, t) = (n, n + 1);
    // arcs: (to, residual); partner is index ^ 1
    let mut to: Vec<usize> = Vec::with_capacity(2 * h.len() + 2 * n);
    let mut residual: Vec<i64> = Vec::with_capacity(2 * h.len() + 2 * n);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut add = |u: usize, v: usize, f: i64, b: i64, to: &mut Vec<usize>, residual: &mut Vec<i64>| {
        adj[u].push(to.len());
        to.push(v);
        residual.push(f);
        adj[v].push(to.len());
        to.push(u);
        residual.push(b);
    };
    let mut seen_edge = vec![false; net.edge_count()];
    for &e in h {
        if std::mem::replace(&mut seen_edge[e], true) {
            continue;
        }
        let (u, v) = net.endpoints(e);
        add(u, v, 1, 1, &mut to, &mut residual);
    }
    let big = h.len() as i64 + 1;
    for &w in &s_set {
        add(s, w, big, 0, &mut to, &mut residual);
    }
    for &w in &t_set {
        add(w, t, big, 0, &mut to, &mut residual);
    }

    let mut count = 0usize;
    let mut via = vec![usize::MAX; n + 2];
    while count < limit {
        via.iter_mut().for_each(|x| *x = usize::MAX);
        via[s] = usize::MAX - 1;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &a in &adj[u] {
                let w = to[a];
                if via[w] == usize::MAX && residual[a] > 0 {
                    via[w] = a;
                    if w == t {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if via[t] == usize::MAX {
            break;
        }
        let mut w = t;
        while w != s {
            let a = via[w];
            residual[a] -= 1;
            residual[a ^ 1] += 1;
            w = to[a ^ 1];
        }
        count += 1;
    }
    Ok(Connectivity::Finite(count))
}

/// True when every demand of `net` reaches its requirement `k` in `h`.
pub(crate) fn meets<N: Network>(net: &N, h: &[EdgeId], sources: &[VertexId], sinks: &[VertexId], k: usize) -> bool {
    unit_paths(net, h, sources, sinks, k)
        .map(|c| c.at_least(k))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent union-find with path halving replaced by naive relabeling.
    fn relabel_components(n: usize, ends: &[(usize, usize)], subset: &[usize]) -> Vec<Vec<usize>> {
        let mut label: Vec<usize> = (0..n).collect();
        for &e in subset {
            let (a, b) = (label[ends[e].0], label[ends[e].1]);
            if a != b {
                let (keep, drop) = (a.min(b), a.max(b));
                for l in label.iter_mut() {
                    if *l == drop {
                        *l = keep;
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (w, &l) in label.iter().enumerate() {
            groups.entry(l).or_default().push(w);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    fn connected_avoiding(n: usize, ends: &[(usize, usize)], h: &[usize], removed: &[usize], s: &[usize], t: &[usize]) -> bool {
        let kept: Vec<usize> = h.iter().copied().filter(|e| !removed.contains(e)).collect();
        let comps = relabel_components(n, ends, &kept);
        comps.iter().any(|c| s.iter().any(|w| c.contains(w)) && t.iter().any(|w| c.contains(w)))
    }

    fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
        if size == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            for mut rest in subsets_of_size(&items[i + 1..], size - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn empty_subset_gives_singletons() {
        let g = SimpleGraph { n: 3, ends: vec![(0, 1), (1, 2)] };
        assert_eq!(connected_components(&g, &[]), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn spanning_tree_gives_one_component() {
        let g = SimpleGraph { n: 4, ends: vec![(0, 1), (1, 2), (1, 3), (0, 3)] };
        assert_eq!(connected_components(&g, &[0, 1, 2]), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn components_match_relabeling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..12);
            let ends: Vec<(usize, usize)> = (0..rng.gen_range(0..20))
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    (u, (u + rng.gen_range(1..n.max(2))) % n)
                })
                .filter(|(u, v)| u != v)
                .collect();
            let g = SimpleGraph { n, ends: ends.clone() };
            let subset: Vec<usize> = (0..ends.len()).filter(|_| rng.gen_bool(0.5)).collect();
            assert_eq!(connected_components(&g, &subset), relabel_components(n, &ends, &subset));
        }
    }

    #[test]
    fn two_disjoint_paths() {
        let g = SimpleGraph { n: 4, ends: vec![(0, 1), (1, 3), (0, 2), (2, 3)] };
        assert_eq!(set_pair_edge_connectivity(&g, &[0, 1, 2, 3], &[0], &[3]).unwrap(), Connectivity::Finite(2));
        assert_eq!(set_pair_edge_connectivity(&g, &[], &[0], &[3]).unwrap(), Connectivity::Finite(0));
    }

    #[test]
    fn overlapping_sides_are_unbounded() {
        let g = SimpleGraph { n: 3, ends: vec![(0, 1)] };
        let c = set_pair_edge_connectivity(&g, &[], &[0, 2], &[2]).unwrap();
        assert_eq!(c, Connectivity::Unbounded);
        assert!(c.at_least(100));
    }

    #[test]
    fn matches_exhaustive_removal_on_seven_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = 7;
            let mut ends = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.45) {
                        ends.push((u, v));
                    }
                }
            }
            ends.truncate(14);
            let g = SimpleGraph { n, ends: ends.clone() };
            let h: Vec<usize> = (0..ends.len()).collect();
            let (s, t) = (vec![0, 1], vec![6]);
            let got = match set_pair_edge_connectivity(&g, &h, &s, &t).unwrap() {
                Connectivity::Finite(c) => c,
                Connectivity::Unbounded => unreachable!(),
            };
            // largest m such that removing any m-1 edges keeps S and T connected
            let mut oracle = 0;
            for m in 1..=h.len() + 1 {
                let survives = subsets_of_size(&h, m - 1)
                    .iter()
                    .all(|r| connected_avoiding(n, &ends, &h, r, &s, &t));
                if survives {
                    oracle = m;
                } else {
                    break;
                }
            }
            assert_eq!(got, oracle);
        }
    }
}
