//! J-divergence between centered Gaussian vectors and nested-design traces.
//!
//! For strictly positive-definite `R₁(n)`, `R₂(n)` the symmetrized Kullback–Leibler
//! divergence is `J(n) = ½(tr(R₁R₂⁻¹) + tr(R₂R₁⁻¹)) − n`. The two measures on the whole
//! index set are equivalent exactly when `J(n)` stays bounded over all finite designs.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::kernels::{gram_with_jitter, CovarianceKernel, Design, GramMatrix};
use crate::linalg;

/// Log-density of `N(0, R(n))` at `y`.
pub fn gaussian_logpdf(g: &GramMatrix, y: &DVector<f64>) -> Result<f64> {
    if y.len() != g.n() {
        return Err(contract(format!("observation of length {} against n = {}", y.len(), g.n())));
    }
    let z = linalg::forward_solve(g.chol(), y);
    let quad = linalg::dot(&z, &z);
    let n = g.n() as f64;
    Ok(-0.5 * quad - 0.5 * g.log_det() - 0.5 * n * (2.0 * std::f64::consts::PI).ln())
}

/// `J(n)` between `N(0, R₁(n))` and `N(0, R₂(n))`.
///
/// Both traces come from triangular solves: `tr(R₁R₂⁻¹) = ‖L₂⁻¹L₁‖_F²`.
pub fn j_divergence(g1: &GramMatrix, g2: &GramMatrix) -> Result<f64> {
    if g1.n() != g2.n() {
        return Err(contract(format!("Gram sizes differ: {} vs {}", g1.n(), g2.n())));
    }
    let t12 = linalg::trace_of_solved_factor(g2.chol(), g1.chol());
    let t21 = linalg::trace_of_solved_factor(g1.chol(), g2.chol());
    Ok(0.5 * (t12 + t21) - g1.n() as f64)
}

/// `J(n)` recorded along nested designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTrace {
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
    /// Least-squares slope of `J` against `n` over the last half of the trace.
    pub slope_estimate: f64,
}

impl DivergenceTrace {
    pub fn new(sizes: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if sizes.len() != values.len() || sizes.is_empty() {
            return Err(contract("trace needs matching, nonempty size and value lists"));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract("trace sizes must be strictly increasing"));
        }
        let slope_estimate = tail_slope(&sizes, &values);
        Ok(Self {
            sizes,
            values,
            slope_estimate,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Slope estimate of each prefix of the trace; the last entry equals `slope_estimate`.
    pub fn running_slopes(&self) -> Vec<f64> {
        (1..=self.len())
            .map(|m| tail_slope(&self.sizes[..m], &self.values[..m]))
            .collect()
    }
}

/// Least-squares slope over the last half of the points (at least two when available).
fn tail_slope(sizes: &[usize], values: &[f64]) -> f64 {
    let len = sizes.len();
    if len < 2 {
        return 0.0;
    }
    let start = (len / 2).min(len - 2);
    let xs: Vec<f64> = sizes[start..].iter().map(|&n| n as f64).collect();
    let ys = &values[start..];
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// J-divergence trace of two kernels over strictly nested designs.
pub fn j_divergence_trace(
    k1: &CovarianceKernel,
    k2: &CovarianceKernel,
    designs: &[Design],
) -> Result<DivergenceTrace> {
    j_divergence_trace_with_jitter(k1, k2, designs, 0.0)
}

/// As [`j_divergence_trace`] with a diagonal jitter added to both Grams.
pub fn j_divergence_trace_with_jitter(
    k1: &CovarianceKernel,
    k2: &CovarianceKernel,
    designs: &[Design],
    jitter: f64,
) -> Result<DivergenceTrace> {
    if designs.is_empty() {
        return Err(contract("no designs given"));
    }
    for (i, w) in designs.windows(2).enumerate() {
        if !w[0].is_strict_prefix_of(&w[1]) {
            return Err(contract(format!("design {} is not a strict prefix of design {}", i, i + 1)));
        }
    }
    let values = designs
        .par_iter()
        .map(|d| {
            let g1 = gram_with_jitter(k1, d, jitter)?;
            let g2 = gram_with_jitter(k2, d, jitter)?;
            j_divergence(&g1, &g2)
        })
        .collect::<Result<Vec<f64>>>()?;
    DivergenceTrace::new(designs.iter().map(Design::len).collect(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictLabel {
    EquivalenceIndicated,
    OrthogonalityIndicated,
    Inconclusive,
}

/// Heuristic reading of a finite divergence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub label: VerdictLabel,
    pub statistic: f64,
    /// `J(n_last) / J(n')` with `n'` the recorded size closest to `n_last / 2`.
    pub doubling_ratio: f64,
    pub rationale: String,
}

pub const ORTHOGONALITY_RATIO: f64 = 1.5;
pub const EQUIVALENCE_RATIO: f64 = 1.05;
pub const EQUIVALENCE_SLOPE_FRACTION: f64 = 0.05;

/// Classifies a trace with a fixed rule.
///
/// With `r` the doubling ratio: `r ≥ 1.5` indicates orthogonality (statistic: slope);
/// `r ≤ 1.05` together with `slope·n_last ≤ 0.05·J(n_last) + 1e-9` indicates equivalence
/// (statistic: `J(n_last)`); anything else is inconclusive (statistic: `r`).
pub fn dichotomy_diagnostic(trace: &DivergenceTrace) -> Result<DichotomyVerdict> {
    if trace.len() < 4 {
        return Err(contract(format!("trace has {} points, need at least 4", trace.len())));
    }
    let last = trace.len() - 1;
    let n_last = trace.sizes[last];
    let j_last = trace.values[last];
    let half = n_last as f64 / 2.0;
    let reference = (0..last)
        .min_by(|&a, &b| {
            let da = (trace.sizes[a] as f64 - half).abs();
            let db = (trace.sizes[b] as f64 - half).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let j_ref = trace.values[reference];
    let ratio = if j_ref > 1e-12 {
        j_last / j_ref
    } else if j_last <= 1e-9 {
        1.0
    } else {
        f64::INFINITY
    };
    let slope = trace.slope_estimate;
    let growth = slope * n_last as f64;

    let (label, statistic, rationale) = if ratio >= ORTHOGONALITY_RATIO {
        (
            VerdictLabel::OrthogonalityIndicated,
            slope,
            format!(
                "J grows by a factor {ratio:.4} from n={} to n={n_last}; slope {slope:.6e}",
                trace.sizes[reference]
            ),
        )
    } else if ratio <= EQUIVALENCE_RATIO && growth <= EQUIVALENCE_SLOPE_FRACTION * j_last + 1e-9 {
        (
            VerdictLabel::EquivalenceIndicated,
            j_last,
            format!(
                "J levels off at {j_last:.6e} (ratio {ratio:.4} over a doubling, slope*n = {growth:.3e})"
            ),
        )
    } else {
        (
            VerdictLabel::Inconclusive,
            ratio,
            format!("ratio {ratio:.4} over a doubling and slope*n = {growth:.3e} fit neither rule"),
        )
    };
    Ok(DichotomyVerdict {
        label,
        statistic,
        doubling_ratio: ratio,
        rationale,
    })
}
