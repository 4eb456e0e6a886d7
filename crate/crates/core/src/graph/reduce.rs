use super::{DemandPair, Edge, EdgeId, Instance};

/// An instance with uniform requirement `k` plus the ids of its auxiliary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformReduction {
    pub instance: Instance,
    /// Ids of the `k` zero-cost auxiliary edges `(a_j, b_j)`, in order `j = 1..k`.
    pub auxiliary_edges: Vec<EdgeId>,
    /// Edge count of the original instance; ids below this are original edges.
    pub original_edge_count: usize,
}

impl UniformReduction {
    /// Drop auxiliary edges from a solution of the reduced instance.
    pub fn restrict(&self, solution: &[EdgeId]) -> Vec<EdgeId> {
        solution
            .iter()
            .copied()
            .filter(|&e| e < self.original_edge_count)
            .collect()
    }
}

/// Lift all requirements to `k = max k_i` with `k` fresh zero-cost edges.
///
/// Edge `(a_j, b_j)` joins two new vertices; a demand with deficit `d = k − k_i`
/// gains `a_1..a_d` on its source side and `b_1..b_d` on its sink side, so each
/// auxiliary edge supplies exactly one extra disjoint path.
pub fn reduce_to_uniform(instance: &Instance) -> UniformReduction {
    let k = instance.max_requirement() as usize;
    let n = instance.n();
    let m = instance.edges().len();
    let mut edges = instance.edges().to_vec();
    let a = |j: usize| n + 2 * j;
    let b = |j: usize| n + 2 * j + 1;
    for j in 0..k {
        edges.push(Edge::new(a(j), b(j), 0.0));
    }
    let demands = instance
        .demands()
        .iter()
        .map(|d| {
            let deficit = k - d.requirement() as usize;
            let mut s = d.sources().to_vec();
            let mut t = d.sinks().to_vec();
            s.extend((0..deficit).map(a));
            t.extend((0..deficit).map(b));
            DemandPair::new(s, t, k as u32)
        })
        .collect();
    let reduced = Instance::new(n + 2 * k, edges, demands).expect("reduction preserves validity");
    UniformReduction {
        instance: reduced,
        auxiliary_edges: (m..m + k).collect(),
        original_edge_count: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_vertex() -> Instance {
        Instance::new(
            5,
            vec![
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 2.0),
                Edge::new(2, 3, 1.0),
                Edge::new(3, 4, 3.0),
                Edge::new(4, 0, 1.0),
                Edge::new(1, 3, 2.0),
                Edge::new(0, 2, 4.0),
            ],
            vec![
                DemandPair::new(vec![0], vec![3], 2),
                DemandPair::new(vec![1, 4], vec![2], 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn uniform_instance_only_gains_unused_edges() {
        let inst = Instance::new(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)],
            vec![DemandPair::new(vec![0], vec![2], 1)],
        )
        .unwrap();
        let r = reduce_to_uniform(&inst);
        assert_eq!(r.auxiliary_edges, vec![2]);
        assert_eq!(r.instance.n(), 5);
        assert_eq!(r.instance.demands(), inst.demands());
        assert_eq!(r.instance.edge(2).cost, 0.0);
    }

    #[test]
    fn deficit_demand_gains_one_auxiliary_pair() {
        let inst = five_vertex();
        let r = reduce_to_uniform(&inst);
        assert_eq!(r.auxiliary_edges, vec![7, 8]);
        let d0 = &r.instance.demands()[0];
        assert_eq!((d0.sources(), d0.sinks(), d0.requirement()), (&[0][..], &[3][..], 2));
        let d1 = &r.instance.demands()[1];
        assert_eq!(d1.sources(), &[1, 4, 5]);
        assert_eq!(d1.sinks(), &[2, 6]);
        assert_eq!(d1.requirement(), 2);
    }

    #[test]
    fn feasibility_preserved_both_directions() {
        let inst = five_vertex();
        let r = reduce_to_uniform(&inst);
        let m = inst.edges().len();
        let mut best_orig = f64::INFINITY;
        let mut best_reduced = f64::INFINITY;
        for mask in 0u32..(1 << m) {
            let h: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
            let mut lifted = h.clone();
            lifted.extend(&r.auxiliary_edges);
            let a = inst.is_feasible(&h);
            let b = r.instance.is_feasible(&lifted);
            assert_eq!(a, b, "subset {h:?}");
            if a {
                best_orig = best_orig.min(inst.cost_of(&h));
            }
            if b {
                best_reduced = best_reduced.min(r.instance.cost_of(&lifted));
            }
        }
        assert_eq!(best_orig, best_reduced);
        assert!(best_orig.is_finite());
    }
}
