//! Set-to-set maximum flow with a certifying minimum cut.
//!
//! Each undirected edge becomes a pair of antiparallel residual arcs that
//! share one capacity budget. Source and sink sets are contracted through
//! super-terminals joined by arcs of capacity `Σ caps + 1`. The search runs
//! capacity-scaling phases and finishes with a shortest-augmenting-path
//! phase, which terminates for arbitrary real capacities.

use std::collections::VecDeque;

use super::{check_vertices, sorted_intersects, normalize, CapacityMap, CutCertificate, GraphError, Network, VertexId};

/// Residual capacities at or below this value are treated as saturated.
pub const FLOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub value: f64,
    pub cut: CutCertificate,
}

struct Arc {
    to: usize,
    residual: f64,
}

struct Residual {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
        }
    }

    /// Arc `a` and its partner `a ^ 1`.
    fn add_pair(&mut self, u: usize, v: usize, forward: f64, backward: f64) {
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, residual: forward });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, residual: backward });
    }

    /// BFS over arcs with residual above `threshold`; returns the parent arc of each node.
    fn bfs(&self, s: usize, threshold: f64) -> Vec<Option<usize>> {
        let mut via = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if !seen[arc.to] && arc.residual > threshold {
                    seen[arc.to] = true;
                    via[arc.to] = Some(a);
                    queue.push_back(arc.to);
                }
            }
        }
        via
    }

    fn augment(&mut self, s: usize, t: usize, threshold: f64) -> Option<f64> {
        let via = self.bfs(s, threshold);
        via[t]?;
        let mut bottleneck = f64::INFINITY;
        let mut w = t;
        while w != s {
            let a = via[w].expect("path arcs recorded");
            bottleneck = bottleneck.min(self.arcs[a].residual);
            w = self.arcs[a ^ 1].to;
        }
        let mut w = t;
        while w != s {
            let a = via[w].expect("path arcs recorded");
            self.arcs[a].residual -= bottleneck;
            self.arcs[a ^ 1].residual += bottleneck;
            w = self.arcs[a ^ 1].to;
        }
        Some(bottleneck)
    }
}

/// Maximum flow from the vertex set `sources` to the vertex set `sinks`.
///
/// The returned cut side contains every source and no sink; its capacity equals
/// the flow value up to accumulated rounding (well below `1e-9` at desk scale).
pub fn max_flow<N: Network>(
    net: &N,
    caps: &CapacityMap,
    sources: &[VertexId],
    sinks: &[VertexId],
) -> Result<FlowResult, GraphError> {
    caps.check_for(net)?;
    let n = net.vertex_count();
    check_vertices(n, sources)?;
    check_vertices(n, sinks)?;
    if sources.is_empty() || sinks.is_empty() {
        return Err(GraphError::InvalidArgument("source and sink sets must be nonempty".into()));
    }
    let s_set = normalize(sources.to_vec());
    let t_set = normalize(sinks.to_vec());
    if sorted_intersects(&s_set, &t_set) {
        return Err(GraphError::InvalidArgument("source and sink sets overlap".into()));
    }

    let (s, t) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    let mut max_cap: f64 = 0.0;
    for e in 0..net.edge_count() {
        let c = caps.get(e);
        if c > 0.0 {
            let (u, v) = net.endpoints(e);
            res.add_pair(u, v, c, c);
            max_cap = max_cap.max(c);
        }
    }
    let big = caps.total() + 1.0;
    for &w in &s_set {
        res.add_pair(s, w, big, 0.0);
    }
    for &w in &t_set {
        res.add_pair(w, t, big, 0.0);
    }

    let mut value = 0.0;
    if max_cap > 0.0 {
        let mut delta = 2f64.powi(max_cap.log2().floor() as i32);
        let floor = max_cap * 2f64.powi(-30);
        while delta >= floor {
            while let Some(pushed) = res.augment(s, t, delta - FLOW_EPS) {
                value += pushed;
            }
            delta /= 2.0;
        }
        while let Some(pushed) = res.augment(s, t, FLOW_EPS) {
            value += pushed;
        }
    }

    let reach = res.bfs(s, FLOW_EPS);
    let side: Vec<VertexId> = (0..n).filter(|&w| s_set.binary_search(&w).is_ok() || reach[w].is_some()).collect();
    let cut = CutCertificate::for_side(net, caps, side);
    Ok(FlowResult { value, cut })
}

/// Capacity of `δ(X)` for the given side.
pub fn cut_capacity<N: Network>(net: &N, caps: &CapacityMap, side: &[VertexId]) -> f64 {
    let mut in_side = vec![false; net.vertex_count()];
    for &w in side {
        in_side[w] = true;
    }
    (0..net.edge_count())
        .filter(|&e| {
            let (u, v) = net.endpoints(e);
            in_side[u] != in_side[v]
        })
        .map(|e| caps.get(e))
        .sum()
}
