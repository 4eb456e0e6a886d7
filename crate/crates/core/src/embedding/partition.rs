use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// An edge inside a cluster, in local vertex indices.
#[derive(Debug, Clone, Copy)]
pub(super) struct LocalEdge {
    pub u: usize,
    pub v: usize,
    pub cap: f64,
}

/// Split a connected cluster of `k ≥ 2` vertices into two nonempty sides by
/// (approximately) minimum expansion `cut / min(|A|, |B|)`.
///
/// Returns `true` for vertices on side `A`.
pub(super) fn bipartition<R: Rng + ?Sized>(
    k: usize,
    edges: &[LocalEdge],
    exact_limit: usize,
    rng: &mut R,
) -> Vec<bool> {
    debug_assert!(k >= 2);
    if k <= exact_limit.min(24) {
        exact(k, edges, rng)
    } else {
        spectral(k, edges)
    }
}

fn expansion(cut: f64, a: usize, k: usize) -> f64 {
    cut / a.min(k - a) as f64
}

fn exact<R: Rng + ?Sized>(k: usize, edges: &[LocalEdge], rng: &mut R) -> Vec<bool> {
    // Vertex k-1 is pinned to side B, so every split is enumerated once.
    let mut best = f64::INFINITY;
    let mut ties: Vec<u32> = Vec::new();
    for mask in 1u32..(1u32 << (k - 1)) {
        let cut: f64 = edges
            .iter()
            .filter(|e| ((mask >> e.u) & 1) != ((mask >> e.v) & 1))
            .map(|e| e.cap)
            .sum();
        let value = expansion(cut, mask.count_ones() as usize, k);
        let slack = 1e-12 * (1.0 + best.abs().min(1e300));
        if value < best - slack {
            best = value;
            ties.clear();
            ties.push(mask);
        } else if value <= best + slack {
            ties.push(mask);
        }
    }
    let mask = ties[rng.gen_range(0..ties.len())];
    (0..k).map(|i| i < k - 1 && (mask >> i) & 1 == 1).collect()
}

fn spectral(k: usize, edges: &[LocalEdge]) -> Vec<bool> {
    let mut adj = DMatrix::<f64>::zeros(k, k);
    let mut degree = vec![0.0; k];
    for e in edges {
        adj[(e.u, e.v)] += e.cap;
        adj[(e.v, e.u)] += e.cap;
        degree[e.u] += e.cap;
        degree[e.v] += e.cap;
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    let mut lap = DMatrix::<f64>::identity(k, k);
    for i in 0..k {
        for j in 0..k {
            if adj[(i, j)] != 0.0 {
                lap[(i, j)] -= adj[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
            }
        }
    }
    let eig = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let fiedler_col = order[1];
    let score: Vec<f64> = (0..k).map(|i| eig.eigenvectors[(i, fiedler_col)] * inv_sqrt[i]).collect();
    let mut by_score: Vec<usize> = (0..k).collect();
    by_score.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));

    let floor = k.div_ceil(4).max(1);
    let mut incident: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for e in edges {
        incident[e.u].push((e.v, e.cap));
        incident[e.v].push((e.u, e.cap));
    }
    let mut side = vec![false; k];
    let mut cut = 0.0;
    let mut best = (f64::INFINITY, floor);
    for (count, &v) in by_score.iter().enumerate().take(k - floor) {
        for &(w, c) in &incident[v] {
            if side[w] {
                cut -= c;
            } else {
                cut += c;
            }
        }
        side[v] = true;
        let size = count + 1;
        if size >= floor {
            let value = expansion(cut, size, k);
            if value < best.0 {
                best = (value, size);
            }
        }
    }
    let mut side = vec![false; k];
    for &v in by_score.iter().take(best.1) {
        side[v] = true;
    }
    local_moves(k, &incident, &mut side, floor);
    side
}

fn local_moves(k: usize, incident: &[Vec<(usize, f64)>], side: &mut [bool], floor: usize) {
    let cut_of = |side: &[bool]| -> f64 {
        let mut c = 0.0;
        for (v, list) in incident.iter().enumerate() {
            for &(w, cap) in list {
                if v < w && side[v] != side[w] {
                    c += cap;
                }
            }
        }
        c
    };
    let mut cut = cut_of(side);
    let mut a = side.iter().filter(|&&s| s).count();
    for _ in 0..k {
        let mut improved = false;
        for v in 0..k {
            let new_a = if side[v] { a - 1 } else { a + 1 };
            if new_a < floor || k - new_a < floor {
                continue;
            }
            let mut delta = 0.0;
            for &(w, c) in &incident[v] {
                if side[w] == side[v] {
                    delta += c;
                } else {
                    delta -= c;
                }
            }
            let current = expansion(cut, a, k);
            let candidate = expansion(cut + delta, new_a, k);
            if candidate < current - 1e-12 * (1.0 + current) {
                side[v] = !side[v];
                cut += delta;
                a = new_a;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}
