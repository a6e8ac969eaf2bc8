//! Linear programming over mixture weights on a point cloud.
//!
//! The one problem shape needed here: maximize `c·w` subject to a handful of
//! inequality constraints `a_k·w ≤ b_k`, with `w` a probability vector (the
//! mixture weights of a timesharing variable). Columns number in the tens of
//! thousands, constraint rows stay ≤ ~4, so a revised simplex that refactors
//! its tiny basis every iteration is both simple and fast.

// The pivot kernels below index several same-length buffers in lockstep;
// explicit indices read better than zipped iterator chains there.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-11;
const STALL_LIMIT: usize = 64;
const MAX_ITERATIONS: usize = 20_000;

/// Optimal value and the supporting mixture weights (sparse, only > 0).
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub weights: Vec<(usize, f64)>,
}

/// Maximize `c·w` subject to `constraints[k].0 · w ≤ constraints[k].1` for all
/// k, `Σ w = 1`, `w ≥ 0`.
///
/// `start_col` must index a column that is feasible as a pure (weight-1)
/// point; the caller guarantees one exists (the all-zero information vector of
/// a constant channel pair). Solutions are deterministic functions of the
/// input ordering.
pub fn maximize_over_simplex(
    c: &[f64],
    constraints: &[(&[f64], f64)],
    start_col: usize,
) -> Result<LpSolution> {
    let n = c.len();
    if n == 0 {
        return Err(Error::DegenerateLp("no columns".into()));
    }
    for (row, _) in constraints {
        if row.len() != n {
            return Err(Error::LengthMismatch(format!(
                "constraint row has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    if start_col >= n {
        return Err(Error::OutOfRange(format!("start column {start_col} ≥ {n}")));
    }
    for (row, bound) in constraints {
        if row[start_col] > bound + REDUCED_COST_TOL {
            return Err(Error::InfeasibleStart);
        }
    }

    let m = constraints.len() + 1; // +1 for the convexity row Σw = 1
    let total_cols = n + constraints.len(); // decision columns then slacks

    // column j of the standard-form matrix, and its cost
    let column = |j: usize, out: &mut Vec<f64>| {
        out.clear();
        if j < n {
            for (row, _) in constraints {
                out.push(row[j]);
            }
            out.push(1.0);
        } else {
            for k in 0..m {
                out.push(if k == j - n { 1.0 } else { 0.0 });
            }
        }
    };
    let cost = |j: usize| if j < n { c[j] } else { 0.0 };

    let mut b = Vec::with_capacity(m);
    for (_, bound) in constraints {
        b.push(*bound);
    }
    b.push(1.0);

    // initial basis: all slacks plus the feasible start column on the
    // convexity row — the basis matrix is unit upper triangular
    let mut basis: Vec<usize> = (n..n + constraints.len()).collect();
    basis.push(start_col);

    let mut col_buf = Vec::with_capacity(m);
    let mut in_basis = vec![false; total_cols];
    for &j in &basis {
        in_basis[j] = true;
    }

    let mut last_objective = f64::NEG_INFINITY;
    let mut stalled = 0usize;
    let mut use_bland = false;

    for _iter in 0..MAX_ITERATIONS {
        // factorize the m×m basis matrix
        let mut bmat = vec![0.0; m * m];
        for (pos, &j) in basis.iter().enumerate() {
            column(j, &mut col_buf);
            for k in 0..m {
                bmat[k * m + pos] = col_buf[k];
            }
        }
        let lu = LuFactors::new(bmat, m)
            .ok_or_else(|| Error::DegenerateLp("singular basis matrix".into()))?;

        let x_b = lu.solve(&b);
        let c_b: Vec<f64> = basis.iter().map(|&j| cost(j)).collect();
        let y = lu.solve_transposed(&c_b);
        let objective: f64 = c_b.iter().zip(&x_b).map(|(ci, xi)| ci * xi).sum();

        if objective > last_objective + 1e-12 {
            last_objective = objective;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > STALL_LIMIT {
                use_bland = true; // Bland's rule: guaranteed to escape cycling
            }
        }

        // pricing
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..total_cols {
            if in_basis[j] {
                continue;
            }
            column(j, &mut col_buf);
            let reduced = cost(j) - y.iter().zip(&col_buf).map(|(yi, ai)| yi * ai).sum::<f64>();
            if reduced > REDUCED_COST_TOL {
                if use_bland {
                    entering = Some((j, reduced));
                    break;
                }
                match entering {
                    Some((_, best)) if reduced <= best => {}
                    _ => entering = Some((j, reduced)),
                }
            }
        }
        let Some((enter, _)) = entering else {
            let weights = basis
                .iter()
                .zip(&x_b)
                .filter(|(&j, &x)| j < n && x > 0.0)
                .map(|(&j, &x)| (j, x))
                .collect();
            return Ok(LpSolution { objective, weights });
        };

        // ratio test with smallest-basic-index tie-breaking
        column(enter, &mut col_buf);
        let d = lu.solve(&col_buf);
        let mut leave: Option<(usize, f64)> = None;
        for (pos, &di) in d.iter().enumerate() {
            if di > RATIO_TOL {
                let ratio = (x_b[pos].max(0.0)) / di;
                let better = match leave {
                    None => true,
                    Some((lpos, lratio)) => {
                        ratio < lratio - 1e-12
                            || (ratio < lratio + 1e-12 && basis[pos] < basis[lpos])
                    }
                };
                if better {
                    leave = Some((pos, ratio));
                }
            }
        }
        let Some((leave_pos, _)) = leave else {
            return Err(Error::DegenerateLp(
                "unbounded direction in a bounded program".into(),
            ));
        };

        in_basis[basis[leave_pos]] = false;
        in_basis[enter] = true;
        basis[leave_pos] = enter;
    }

    Err(Error::DegenerateLp(format!(
        "no convergence within {MAX_ITERATIONS} pivots"
    )))
}

/// Dense LU with partial pivoting for the (tiny) basis matrix.
struct LuFactors {
    lu: Vec<f64>,
    perm: Vec<usize>,
    m: usize,
}

impl LuFactors {
    fn new(mut a: Vec<f64>, m: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..m).collect();
        for col in 0..m {
            let mut pivot = col;
            let mut best = a[perm[col] * m + col].abs();
            for r in col + 1..m {
                let v = a[perm[r] * m + col].abs();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best < 1e-13 {
                return None;
            }
            perm.swap(col, pivot);
            let prow = perm[col];
            let pval = a[prow * m + col];
            for r in col + 1..m {
                let row = perm[r];
                let factor = a[row * m + col] / pval;
                a[row * m + col] = factor;
                for cc in col + 1..m {
                    a[row * m + cc] -= factor * a[prow * m + cc];
                }
            }
        }
        Some(Self { lu: a, perm, m })
    }

    /// Solve A x = rhs.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut x = vec![0.0; m];
        for i in 0..m {
            let mut v = rhs[self.perm[i]];
            for k in 0..i {
                v -= self.lu[self.perm[i] * m + k] * x[k];
            }
            x[i] = v;
        }
        for i in (0..m).rev() {
            let mut v = x[i];
            for k in i + 1..m {
                v -= self.lu[self.perm[i] * m + k] * x[k];
            }
            x[i] = v / self.lu[self.perm[i] * m + i];
        }
        x
    }

    /// Solve Aᵀ y = rhs.
    fn solve_transposed(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        // solve Uᵀ z = rhs (forward), then Lᵀ w = z (backward), y = Pᵀ w
        let mut z = vec![0.0; m];
        for i in 0..m {
            let mut v = rhs[i];
            for k in 0..i {
                v -= self.lu[self.perm[k] * m + i] * z[k];
            }
            z[i] = v / self.lu[self.perm[i] * m + i];
        }
        for i in (0..m).rev() {
            let mut v = z[i];
            for k in i + 1..m {
                v -= self.lu[self.perm[k] * m + i] * z[k];
            }
            z[i] = v;
        }
        let mut y = vec![0.0; m];
        for i in 0..m {
            y[self.perm[i]] = z[i];
        }
        y
    }
}
