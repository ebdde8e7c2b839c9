//! Dense Cholesky factorization and triangular solves.
//!
//! Summation order inside every inner product is fixed (increasing index),
//! so results do not depend on how callers schedule work across threads.

use nalgebra::{DMatrix, DVector};

use crate::error::{GpError, Result};

/// Lower-triangular factor `L` with `L Lᵀ = a`. Only the lower triangle of `a` is read.
///
/// A pivot at rounding level relative to its diagonal entry (`≤ 8nε·a_jj`) is treated as
/// singular: rank-deficient matrices otherwise slip through with tiny positive pivots.
pub(crate) fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let rel_tol = 8.0 * n as f64 * f64::EPSILON;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > rel_tol * a[(j, j)]) || !d.is_finite() {
            return Err(GpError::SingularGram { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub(crate) fn forward_solve(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub(crate) fn backward_solve_transposed(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `L X = B` column by column.
pub(crate) fn forward_solve_matrix(l: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..b.ncols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Squared Frobenius norm of `L⁻¹ M` for lower-triangular `L` and lower-triangular `M`.
///
/// Equals `tr(M Mᵀ (L Lᵀ)⁻¹)`; with `M` a Cholesky factor this is `tr(A B⁻¹)`.
pub(crate) fn trace_of_solved_factor(l: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    let n = l.nrows();
    // L⁻¹ M stays lower triangular, so column c only needs rows c..n.
    let mut total = 0.0;
    let mut col = vec![0.0; n];
    for c in 0..n {
        for i in 0..n {
            col[i] = 0.0;
        }
        let mut col_sum = 0.0;
        for i in c..n {
            let mut s = m[(i, c)];
            for k in c..i {
                s -= l[(i, k)] * col[k];
            }
            col[i] = s / l[(i, i)];
            col_sum += col[i] * col[i];
        }
        total += col_sum;
    }
    total
}

pub(crate) fn dot(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}
