use nalgebra::DMatrix;

use super::{CovarianceKernel, Design};
use crate::error::{contract, Result};
use crate::linalg;

/// Symmetric positive-definite kernel matrix with its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
    chol: DMatrix<f64>,
    log_det: f64,
}

impl GramMatrix {
    /// Factorizes a symmetric matrix. Fails with `SingularGram` if it is not numerically PD.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(contract(format!(
                "Gram matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let scale = entries.amax();
        let n = entries.nrows();
        for i in 0..n {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 * scale {
                    return Err(contract(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let chol = linalg::cholesky(&entries)?;
        let log_det = 2.0 * chol.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            entries,
            chol,
            log_det,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Lower-triangular factor `L` with `L Lᵀ = entries`.
    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `R⁻¹ b` by forward and backward substitution.
    pub fn solve(&self, b: &nalgebra::DVector<f64>) -> Result<nalgebra::DVector<f64>> {
        if b.len() != self.n() {
            return Err(contract(format!("right-hand side of length {} for n = {}", b.len(), self.n())));
        }
        let y = linalg::forward_solve(&self.chol, b);
        Ok(linalg::backward_solve_transposed(&self.chol, &y))
    }

    /// `c·R` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_matrix(&self.entries * c)
    }
}

/// Assembles and factorizes `R(n) = [R(tᵢ, tⱼ)]` over the design.
pub fn gram(kernel: &CovarianceKernel, design: &Design) -> Result<GramMatrix> {
    gram_with_jitter(kernel, design, 0.0)
}

/// As [`gram`], adding `jitter` to the diagonal before factorizing.
///
/// Regularized matrices no longer belong to the kernel, so divergences computed from them are
/// biased. Intended for exploration only; the default elsewhere is zero.
pub fn gram_with_jitter(kernel: &CovarianceKernel, design: &Design, jitter: f64) -> Result<GramMatrix> {
    if design.is_empty() {
        return Err(contract("design is empty"));
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(contract(format!("jitter must be nonnegative, got {jitter}")));
    }
    kernel.check_geometry(design.geometry())?;
    if let CovarianceKernel::Brownian { .. } = kernel {
        if design.points().iter().any(|p| p.coords[0] < 0.0) {
            return Err(contract("Brownian kernel needs points in [0, inf)"));
        }
    }
    let pts = design.points();
    let n = pts.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval_unchecked(&pts[i], &pts[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m[(i, i)] += jitter;
    }
    GramMatrix::from_matrix(m)
}
