//! RKHS computations on a finite design.
//!
//! On `T_n` the RKHS of `R` is `R^n` with inner product `⟨v, w⟩ = vᵀ R(n)⁻¹ w`.
//! All solves go through the cached Cholesky factor.

use nalgebra::{DMatrix, DVector};

use crate::error::{contract, Result};
use crate::kernels::{Design, GramMatrix};
use crate::linalg;

/// Values of a function on the points of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFunction {
    design: Design,
    values: DVector<f64>,
}

impl FiniteFunction {
    pub fn new(design: Design, values: Vec<f64>) -> Result<Self> {
        if values.len() != design.len() {
            return Err(contract(format!(
                "{} values for a design of {} points",
                values.len(),
                design.len()
            )));
        }
        Ok(Self {
            design,
            values: DVector::from_vec(values),
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }
}

fn check_len(g: &GramMatrix, v: &DVector<f64>) -> Result<()> {
    if v.len() != g.n() {
        return Err(contract(format!("vector of length {} against a {}x{} Gram", v.len(), g.n(), g.n())));
    }
    Ok(())
}

/// `vᵀ R(n)⁻¹ w`, computed as `(L⁻¹v)·(L⁻¹w)` so it is exactly symmetric in `(v, w)`.
pub fn rkhs_inner(g: &GramMatrix, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
    check_len(g, v)?;
    check_len(g, w)?;
    let a = linalg::forward_solve(g.chol(), v);
    let b = linalg::forward_solve(g.chol(), w);
    Ok(linalg::dot(&a, &b))
}

/// `√(fᵀ R(n)⁻¹ f)`.
pub fn rkhs_norm(g: &GramMatrix, f: &FiniteFunction) -> Result<f64> {
    check_len(g, f.values())?;
    let a = linalg::forward_solve(g.chol(), f.values());
    Ok(linalg::dot(&a, &a).sqrt())
}

/// Residual of the reproducing identity `f(tᵢ) = ⟨f, R(·, tᵢ)⟩`.
pub fn reproducing_check(g: &GramMatrix, f: &FiniteFunction, i: usize) -> Result<f64> {
    if i >= g.n() {
        return Err(contract(format!("index {i} out of range for n = {}", g.n())));
    }
    let column = g.entries().column(i).into_owned();
    let inner = rkhs_inner(g, f.values(), &column)?;
    Ok((inner - f.values()[i]).abs())
}

/// Squared norm of `D` in the tensor-product RKHS of `R ⊗ R` restricted to `T_n × T_n`:
/// `tr(R⁻¹ D R⁻¹ Dᵀ)`.
///
/// Evaluated as `‖L⁻¹ D L⁻ᵀ‖_F²`, which is nonnegative by construction.
pub fn tensor_norm_finite(g: &GramMatrix, d: &DMatrix<f64>) -> Result<f64> {
    let n = g.n();
    if d.nrows() != n || d.ncols() != n {
        return Err(contract(format!(
            "difference matrix is {}x{}, Gram is {n}x{n}",
            d.nrows(),
            d.ncols()
        )));
    }
    let scale = d.amax().max(g.entries().amax());
    for i in 0..n {
        for j in 0..i {
            if (d[(i, j)] - d[(j, i)]).abs() > 1e-10 * scale {
                return Err(contract(format!("difference matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    let l = g.chol();
    let half = linalg::forward_solve_matrix(l, d);
    let full = linalg::forward_solve_matrix(l, &half.transpose());
    Ok(full.iter().map(|x| x * x).sum())
}
