use serde::{Deserialize, Serialize};

use crate::graph::{CapacityMap, EdgeId};
use crate::lp::FractionalSolution;

/// Capped capacities `x̃` and the LARGE / SMALL classification.
///
/// `small` holds every edge below the threshold, including the `zeroed` ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CappedCapacities {
    pub capacities: CapacityMap,
    pub level: usize,
    pub beta: f64,
    /// `1 / (4ℓβ)` with `ℓ` read as `max(level, 1)`.
    pub threshold: f64,
    /// `threshold / (2n²)`.
    pub tiny_threshold: f64,
    pub large: Vec<EdgeId>,
    pub small: Vec<EdgeId>,
    pub zeroed: Vec<EdgeId>,
}

impl CappedCapacities {
    /// Largest over smallest positive capacity (1 when at most one value is positive).
    pub fn ratio(&self) -> f64 {
        let positive = self.capacities.as_slice().iter().copied().filter(|&c| c > 0.0);
        let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(c), hi.max(c)));
        if hi == 0.0 {
            1.0
        } else {
            hi / lo
        }
    }
}

/// `1 / (4 · max(ℓ, 1) · β)`.
pub fn capping_threshold(level: usize, beta: f64) -> f64 {
    1.0 / (4.0 * level.max(1) as f64 * beta)
}

/// Cap LARGE edges at the threshold and drop tiny values.
pub fn cap_capacities(x: &FractionalSolution, level: usize, beta: f64, n: usize) -> CappedCapacities {
    let threshold = capping_threshold(level, beta);
    let nf = n.max(1) as f64;
    let tiny_threshold = threshold / (2.0 * nf * nf);
    let mut values = Vec::with_capacity(x.x.len());
    let (mut large, mut small, mut zeroed) = (Vec::new(), Vec::new(), Vec::new());
    for (e, &xe) in x.x.iter().enumerate() {
        if xe >= threshold {
            large.push(e);
            values.push(threshold);
        } else {
            small.push(e);
            if xe < tiny_threshold {
                zeroed.push(e);
                values.push(0.0);
            } else {
                values.push(xe);
            }
        }
    }
    CappedCapacities {
        capacities: CapacityMap::new(values).expect("capped values are finite"),
        level,
        beta,
        threshold,
        tiny_threshold,
        large,
        small,
        zeroed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(x: Vec<f64>) -> FractionalSolution {
        FractionalSolution { x, objective: 0.0 }
    }

    #[test]
    fn large_edge_capped_to_one_eighth() {
        let c = cap_capacities(&frac(vec![0.2]), 1, 2.0, 4);
        assert_eq!(c.large, vec![0]);
        assert_eq!(c.capacities.get(0), 0.125);
    }

    #[test]
    fn tiny_edge_zeroed() {
        // threshold 1/8, tiny threshold (1/32)(1/8) = 1/256 ≈ 0.0039
        let c = cap_capacities(&frac(vec![0.003, 0.004]), 1, 2.0, 4);
        assert_eq!(c.tiny_threshold, 1.0 / 256.0);
        assert_eq!(c.zeroed, vec![0]);
        assert_eq!(c.capacities.get(0), 0.0);
        assert_eq!(c.capacities.get(1), 0.004);
        assert_eq!(c.small, vec![0, 1]);
    }

    #[test]
    fn threshold_is_inclusive() {
        let c = cap_capacities(&frac(vec![0.125]), 1, 2.0, 4);
        assert_eq!(c.large, vec![0]);
    }

    #[test]
    fn level_zero_reads_as_one() {
        assert_eq!(capping_threshold(0, 2.0), capping_threshold(1, 2.0));
        assert_eq!(capping_threshold(2, 1.0), 0.125);
    }

    #[test]
    fn ratio_is_bounded_by_two_n_squared() {
        let n = 5;
        let x = vec![1.0, 0.5, 0.01, 0.0051, 0.0049, 0.0];
        let c = cap_capacities(&frac(x), 1, 1.0, n);
        assert!(c.ratio() <= 2.0 * (n * n) as f64 + 1e-9);
    }
}
