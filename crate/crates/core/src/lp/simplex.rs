//! Dense two-phase tableau simplex.
//!
//! Entering columns are chosen by most negative reduced cost; after a run of
//! degenerate pivots the phase switches to Bland's smallest-index rule, which
//! cannot cycle.

use thiserror::Error;

/// Pivot and feasibility tolerance.
pub const PIVOT_EPS: f64 = 1e-9;

const DEGENERATE_STREAK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c·x` subject to rows, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub var_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("linear program is infeasible (phase-one residual {0})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("pivot limit of {0} reached")]
    PivotLimit(usize),
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            var_names: (0..num_vars).map(|j| format!("v{j}")).collect(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution, SimplexError> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// Row-major, `m + 1` rows (last is the cost row), `width` columns (last is rhs).
    data: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
    /// Columns `[artificial_start, width - 1)` are artificial.
    artificial_start: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let nv = lp.num_vars;
        let slack_count = lp.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        // A row needs an artificial unless it is `≤` with nonnegative rhs (or `≥` with nonpositive rhs).
        let needs_art: Vec<bool> = lp
            .rows
            .iter()
            .map(|r| match r.relation {
                Relation::Le => r.rhs < 0.0,
                Relation::Ge => r.rhs > 0.0,
                Relation::Eq => true,
            })
            .collect();
        let art_count = needs_art.iter().filter(|&&b| b).count();
        let artificial_start = nv + slack_count;
        let width = artificial_start + art_count + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut basis = vec![0; m];
        let mut slack = nv;
        let mut art = artificial_start;
        for (i, row) in lp.rows.iter().enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let base = i * width;
            for &(j, a) in &row.coeffs {
                data[base + j] += sign * a;
            }
            data[base + width - 1] = sign * row.rhs;
            let slack_col = match row.relation {
                Relation::Eq => None,
                Relation::Le | Relation::Ge => {
                    let s = slack;
                    slack += 1;
                    let coef = if row.relation == Relation::Le { 1.0 } else { -1.0 };
                    data[base + s] = sign * coef;
                    Some(s)
                }
            };
            if needs_art[i] {
                data[base + art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = slack_col.expect("rows without artificials carry a slack");
            }
        }
        Tableau {
            data,
            m,
            width,
            basis,
            artificial_start,
            pivots: 0,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn cost_row(&self) -> usize {
        self.m
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width;
        let c = self.cost_row() * w;
        for j in 0..w {
            self.data[c + j] = costs.get(j).copied().unwrap_or(0.0);
        }
        for i in 0..self.m {
            let cb = costs.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.data[c + j] -= cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        let mut nz: Vec<usize> = Vec::new();
        for j in 0..w {
            let v = self.data[r * w + j] / p;
            if v.abs() < 1e-14 {
                self.data[r * w + j] = 0.0;
            } else {
                self.data[r * w + j] = v;
                nz.push(j);
            }
        }
        self.data[r * w + c] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f == 0.0 {
                continue;
            }
            for &j in &nz {
                let v = self.data[i * w + j] - f * self.data[r * w + j];
                self.data[i * w + j] = if v.abs() < 1e-14 { 0.0 } else { v };
            }
            self.data[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Optimize the current cost row over columns `< allowed`.
    fn optimize(&mut self, allowed: usize, limit: usize) -> Result<(), SimplexError> {
        let w = self.width;
        let mut bland = false;
        let mut streak = 0;
        loop {
            if self.pivots >= limit {
                return Err(SimplexError::PivotLimit(limit));
            }
            let cost = self.cost_row() * w;
            let entering = if bland {
                (0..allowed).find(|&j| self.data[cost + j] < -PIVOT_EPS)
            } else {
                let mut best = None;
                let mut best_val = -PIVOT_EPS;
                for j in 0..allowed {
                    let d = self.data[cost + j];
                    if d < best_val {
                        best_val = d;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let ratio = self.at(i, w - 1).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Err(SimplexError::Unbounded) };
            if ratio <= PIVOT_EPS {
                streak += 1;
                if streak >= DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, SimplexError> {
        let w = self.width;
        let limit = 200 * (self.m + w) + 10_000;
        if self.artificial_start < w - 1 {
            let mut phase_one = vec![0.0; w];
            for c in phase_one.iter_mut().take(w - 1).skip(self.artificial_start) {
                *c = 1.0;
            }
            self.set_costs(&phase_one);
            self.optimize(w - 1, limit)?;
            let residual = -self.data[self.cost_row() * w + w - 1];
            if residual > 1e-7 {
                return Err(SimplexError::Infeasible(residual));
            }
            // Drive remaining artificials out of the basis where possible.
            for i in 0..self.m {
                if self.basis[i] >= self.artificial_start {
                    if let Some(c) = (0..self.artificial_start).find(|&j| self.at(i, j).abs() > PIVOT_EPS) {
                        self.pivot(i, c);
                    }
                }
            }
        }
        let mut costs = vec![0.0; w];
        costs[..lp.num_vars].copy_from_slice(&lp.objective);
        self.set_costs(&costs);
        self.optimize(self.artificial_start, limit)?;
        let mut x = vec![0.0; lp.num_vars];
        for i in 0..self.m {
            if self.basis[i] < lp.num_vars {
                x[self.basis[i]] = self.at(i, w - 1).max(0.0);
            }
        }
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: self.pivots,
        })
    }
}
