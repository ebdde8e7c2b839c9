//! Numerical tools for deciding whether two centered Gaussian process
//! distributions are equivalent or mutually singular.
//!
//! The crate covers three routes to the same dichotomy:
//!
//! * finite-design J-divergence traces ([`divergence`]), whose boundedness
//!   along an exhausting sequence of designs characterizes equivalence;
//! * RKHS norms on finite designs ([`rkhs`]), including the restricted
//!   tensor-product norm of the covariance difference;
//! * spectral criteria ([`spectral`]) for isotropic kernels on spheres and
//!   for atomic spectral measures on homogeneous spaces.
//!
//! [`sampler`] and [`mle`] support Monte Carlo maximum-likelihood
//! experiments contrasting microergodic and non-microergodic parameters.

pub mod divergence;
pub mod error;
pub mod kernels;
pub(crate) mod linalg;
pub mod mle;
pub mod rkhs;
pub mod sampler;
pub mod spectral;

pub use divergence::{
    dichotomy_diagnostic, gaussian_logpdf, j_divergence, j_divergence_trace, DichotomyVerdict,
    DivergenceTrace, VerdictLabel,
};
pub use error::{GpError, Result};
pub use kernels::{
    eval_kernel, gegenbauer_normalized, gram, harmonic_dimension, CovarianceKernel, Design,
    Geometry, GramMatrix, Point, SchoenbergSpectrum,
};
pub use rkhs::{reproducing_check, rkhs_inner, rkhs_norm, tensor_norm_finite, FiniteFunction};
pub use spectral::{
    check_shared_atoms, chow_sum, sphere_equivalence_sum, Atom, AtomicSpectralMeasure,
    CriterionResult, DimensionModel, RatioModel, SeriesVerdict,
};
