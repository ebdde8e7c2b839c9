//! Covariance kernels, evaluation designs and Gram matrices.

mod design;
mod gram;
mod special;

pub use design::{
    dyadic_designs, dyadic_sequence, equispaced_grid, sphere_designs, sphere_spiral_points,
    Design, Geometry, Point,
};
pub use gram::{gram, gram_with_jitter, GramMatrix};
pub use special::{gegenbauer_normalized, gegenbauer_sequence, harmonic_dimension};

pub(crate) use special::harmonic_dimension_f64;

use serde::{Deserialize, Serialize};

use crate::error::{contract, GpError, Result};
use special::gegenbauer_for_each;

/// Degree-wise Schoenberg coefficients `a(0), …, a(K)` of an isotropic kernel on `S^{d-1}`.
///
/// Coefficients past the list are zero: the truncation order is part of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct SchoenbergSpectrum {
    sphere_dim: usize,
    coeffs: Vec<f64>,
    // a(k)·h(k), cached for kernel evaluation
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    d: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<SpectrumRepr> for SchoenbergSpectrum {
    type Error = GpError;
    fn try_from(r: SpectrumRepr) -> Result<Self> {
        Self::new(r.d, r.coeffs)
    }
}

impl From<SchoenbergSpectrum> for SpectrumRepr {
    fn from(s: SchoenbergSpectrum) -> Self {
        Self {
            d: s.sphere_dim,
            coeffs: s.coeffs,
        }
    }
}

impl SchoenbergSpectrum {
    pub fn new(sphere_dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if sphere_dim < 3 {
            return Err(contract(format!("sphere dimension must be >= 3, got {sphere_dim}")));
        }
        if coeffs.is_empty() {
            return Err(contract("Schoenberg spectrum needs at least one coefficient"));
        }
        if let Some(k) = coeffs.iter().position(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(contract(format!("coefficient a({k}) = {} is not a nonnegative number", coeffs[k])));
        }
        let weights = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * harmonic_dimension_f64(sphere_dim, k))
            .collect();
        Ok(Self {
            sphere_dim,
            coeffs,
            weights,
        })
    }

    /// Ambient dimension `d` (the sphere is `S^{d-1}`).
    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient `a(k)`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn positive_count(&self) -> usize {
        self.coeffs.iter().filter(|a| **a > 0.0).count()
    }

    /// `Σ_k h(k)·a(k)`, the kernel's value on the diagonal.
    pub fn trace_value(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `h(K)·a(K)` for the last retained degree; a crude truncation diagnostic.
    pub fn tail_term(&self) -> f64 {
        *self.weights.last().unwrap()
    }

    /// Same spectrum with every coefficient multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.sphere_dim, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `Σ_k a(k)·h(k)·G_k(x)` for `x = ⟨s, t⟩` already clamped to `[-1, 1]`.
    fn zonal(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        gegenbauer_for_each(self.weights.len() - 1, self.sphere_dim, x, |k, g| {
            acc += self.weights[k] * g;
        });
        acc
    }
}

/// Covariance kernels supported by the library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub enum CovarianceKernel {
    /// `σ²·min(s, t)` on `[0, ∞)`.
    Brownian { sigma: f64 },
    /// `σ²·exp(−β‖s − t‖)` on `R^d`.
    Exponential { sigma: f64, beta: f64 },
    /// Isotropic kernel on the sphere given by its Schoenberg coefficients.
    Schoenberg(SchoenbergSpectrum),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
enum KernelRepr {
    Brownian { sigma: f64 },
    Exponential { sigma: f64, beta: f64 },
    Schoenberg { d: usize, coeffs: Vec<f64> },
}

impl TryFrom<KernelRepr> for CovarianceKernel {
    type Error = GpError;
    fn try_from(r: KernelRepr) -> Result<Self> {
        match r {
            KernelRepr::Brownian { sigma } => Self::brownian(sigma),
            KernelRepr::Exponential { sigma, beta } => Self::exponential(sigma, beta),
            KernelRepr::Schoenberg { d, coeffs } => {
                Ok(Self::Schoenberg(SchoenbergSpectrum::new(d, coeffs)?))
            }
        }
    }
}

impl From<CovarianceKernel> for KernelRepr {
    fn from(k: CovarianceKernel) -> Self {
        match k {
            CovarianceKernel::Brownian { sigma } => KernelRepr::Brownian { sigma },
            CovarianceKernel::Exponential { sigma, beta } => KernelRepr::Exponential { sigma, beta },
            CovarianceKernel::Schoenberg(s) => KernelRepr::Schoenberg {
                d: s.sphere_dim,
                coeffs: s.coeffs,
            },
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(contract(format!("{name} must be positive and finite, got {v}")))
    }
}

impl CovarianceKernel {
    pub fn brownian(sigma: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        Ok(Self::Brownian { sigma })
    }

    pub fn exponential(sigma: f64, beta: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        check_positive("beta", beta)?;
        Ok(Self::Exponential { sigma, beta })
    }

    pub fn schoenberg(spectrum: SchoenbergSpectrum) -> Self {
        Self::Schoenberg(spectrum)
    }

    /// Kernel multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_positive("scale", c)?;
        match self {
            Self::Brownian { sigma } => Self::brownian(sigma * c.sqrt()),
            Self::Exponential { sigma, beta } => Self::exponential(sigma * c.sqrt(), *beta),
            Self::Schoenberg(s) => Ok(Self::Schoenberg(s.scaled(c)?)),
        }
    }

    /// Checks that points of `geometry` can be fed to this kernel.
    pub fn check_geometry(&self, geometry: Geometry) -> Result<()> {
        let ok = match (self, geometry) {
            (Self::Brownian { .. }, Geometry::Euclidean(1)) => true,
            (Self::Exponential { .. }, Geometry::Euclidean(_)) => true,
            (Self::Schoenberg(s), Geometry::Sphere(d)) => s.sphere_dim == d,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GpError::Geometry(format!("kernel {self:?} cannot be evaluated on {geometry:?}")))
        }
    }

    /// Evaluation without point checks; callers guarantee compatible points.
    pub(crate) fn eval_unchecked(&self, s: &Point, t: &Point) -> f64 {
        match self {
            Self::Brownian { sigma } => sigma * sigma * s.coords[0].min(t.coords[0]),
            Self::Exponential { sigma, beta } => sigma * sigma * (-beta * s.distance(t)).exp(),
            Self::Schoenberg(spec) => spec.zonal(s.dot(t).clamp(-1.0, 1.0)),
        }
    }
}

/// Evaluates `R(s, t)`.
pub fn eval_kernel(kernel: &CovarianceKernel, s: &Point, t: &Point) -> Result<f64> {
    if s.dim() != t.dim() {
        return Err(GpError::Geometry(format!(
            "points have {} and {} coordinates",
            s.dim(),
            t.dim()
        )));
    }
    match kernel {
        CovarianceKernel::Brownian { .. } => {
            if s.dim() != 1 || s.coords[0] < 0.0 || t.coords[0] < 0.0 {
                return Err(GpError::Geometry(
                    "Brownian kernel needs scalar points in [0, inf)".into(),
                ));
            }
        }
        CovarianceKernel::Exponential { .. } => {}
        CovarianceKernel::Schoenberg(spec) => {
            if s.dim() != spec.sphere_dim {
                return Err(GpError::Geometry(format!(
                    "Schoenberg kernel on S^{} needs points in R^{}, got R^{}",
                    spec.sphere_dim - 1,
                    spec.sphere_dim,
                    s.dim()
                )));
            }
            for p in [s, t] {
                if (p.norm() - 1.0).abs() > 1e-12 {
                    return Err(GpError::Geometry(format!("point with norm {} is not on the sphere", p.norm())));
                }
            }
        }
    }
    Ok(kernel.eval_unchecked(s, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_example() {
        let k = CovarianceKernel::brownian(2.0).unwrap();
        let v = eval_kernel(&k, &Point::scalar(0.3), &Point::scalar(0.7)).unwrap();
        assert!((v - 1.2).abs() < 1e-15);
    }

    #[test]
    fn exponential_on_diagonal() {
        let k = CovarianceKernel::exponential(1.0, 1.0).unwrap();
        let p = Point::scalar(0.42);
        assert_eq!(eval_kernel(&k, &p, &p).unwrap(), 1.0);
    }

    #[test]
    fn schoenberg_diagonal_example() {
        let spec = SchoenbergSpectrum::new(3, vec![1.0, 1.0, 0.0]).unwrap();
        let k = CovarianceKernel::schoenberg(spec);
        let t = Point::new(vec![0.0, 0.6, 0.8]);
        let v = eval_kernel(&k, &t, &t).unwrap();
        // a(0)h(0) + a(1)h(1) = 1 + 3
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn geometry_mismatch_is_reported() {
        let spec = SchoenbergSpectrum::new(3, vec![1.0]).unwrap();
        let k = CovarianceKernel::schoenberg(spec);
        let r = eval_kernel(&k, &Point::scalar(0.1), &Point::scalar(0.2));
        assert!(matches!(r, Err(GpError::Geometry(_))));
        let b = CovarianceKernel::brownian(1.0).unwrap();
        assert!(eval_kernel(&b, &Point::scalar(-0.1), &Point::scalar(0.2)).is_err());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(CovarianceKernel::brownian(0.0).is_err());
        assert!(CovarianceKernel::exponential(1.0, -1.0).is_err());
        assert!(SchoenbergSpectrum::new(3, vec![1.0, -0.1]).is_err());
        assert!(SchoenbergSpectrum::new(2, vec![1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let k: CovarianceKernel =
            serde_json::from_str(r#"{"variant": "exponential", "sigma": 1.0, "beta": 2.0}"#).unwrap();
        assert_eq!(k, CovarianceKernel::exponential(1.0, 2.0).unwrap());
        let s: CovarianceKernel =
            serde_json::from_str(r#"{"variant": "schoenberg", "d": 3, "coeffs": [1.0, 0.5]}"#).unwrap();
        let back: CovarianceKernel = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        assert!(serde_json::from_str::<CovarianceKernel>(r#"{"variant": "brownian", "sigma": -1}"#).is_err());
    }

    #[test]
    fn spectrum_diagnostics() {
        let s = SchoenbergSpectrum::new(3, vec![1.0, 0.0, 0.5]).unwrap();
        assert_eq!(s.positive_count(), 2);
        assert_eq!(s.truncation_order(), 2);
        assert!((s.trace_value() - 3.5).abs() < 1e-15);
        assert!((s.tail_term() - 2.5).abs() < 1e-15);
        assert_eq!(s.coeff(10), 0.0);
    }
}
