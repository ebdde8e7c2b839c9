//! Maximum-likelihood estimation of covariance parameters.
//!
//! The search runs a Nelder–Mead simplex on unconstrained coordinates `u`, mapped into the
//! parameter box by a logistic function (optionally on the log scale), from several
//! deterministic starting points.

mod experiment;
mod simplex;

pub use experiment::{microergodic_experiment, ConsistencyReport, ConsistencyRow, EstimationMode, ExperimentConfig};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::gaussian_logpdf;
use crate::error::{contract, GpError, Result};
use crate::kernels::{gram, CovarianceKernel, Design, Geometry};
use simplex::{minimize, SimplexSettings};

/// Value substituted for the negative log-likelihood where the Gram is singular.
pub const PENALTY_VALUE: f64 = 1e100;

/// Box `lower < θ < upper` in `R^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(contract("parameter box needs matching, nonempty bounds"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(contract(format!("empty or unbounded box in coordinate {i}: [{lo}, {hi}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dims()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(t, (lo, hi))| lo <= t && t <= hi)
    }
}

/// A parametric covariance model `θ ↦ R_θ`.
pub trait KernelFamily: Send + Sync {
    fn dims(&self) -> usize;
    fn kernel(&self, theta: &[f64]) -> Result<CovarianceKernel>;
}

/// `θ = (σ, β) ↦ σ²·exp(−β|s − t|)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialFamily;

impl KernelFamily for ExponentialFamily {
    fn dims(&self) -> usize {
        2
    }
    fn kernel(&self, theta: &[f64]) -> Result<CovarianceKernel> {
        CovarianceKernel::exponential(theta[0], theta[1])
    }
}

/// `θ = (σ) ↦ σ²·exp(−β|s − t|)` with `β` held fixed.
#[derive(Debug, Clone, Copy)]
pub struct FixedRangeExponentialFamily {
    pub beta: f64,
}

impl KernelFamily for FixedRangeExponentialFamily {
    fn dims(&self) -> usize {
        1
    }
    fn kernel(&self, theta: &[f64]) -> Result<CovarianceKernel> {
        CovarianceKernel::exponential(theta[0], self.beta)
    }
}

/// `θ = (c) ↦ c·R₁` for a fixed base kernel.
#[derive(Debug, Clone)]
pub struct ScaleFamily {
    pub base: CovarianceKernel,
}

impl KernelFamily for ScaleFamily {
    fn dims(&self) -> usize {
        1
    }
    fn kernel(&self, theta: &[f64]) -> Result<CovarianceKernel> {
        self.base.scaled(theta[0])
    }
}

/// How the Gaussian log-density is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikelihoodMethod {
    /// Dense Cholesky factorization of the Gram matrix.
    Dense,
    /// Markov factorization for exponential kernels on one-dimensional designs, dense otherwise.
    #[default]
    Auto,
}

/// Observed vector `y` on a design together with a parametric family.
pub struct LikelihoodProblem<'a> {
    family: &'a dyn KernelFamily,
    design: Design,
    data: DVector<f64>,
    method: LikelihoodMethod,
    // design indices sorted by location, for the Markov factorization
    order: Option<Vec<usize>>,
}

impl<'a> LikelihoodProblem<'a> {
    pub fn new(family: &'a dyn KernelFamily, design: Design, data: Vec<f64>) -> Result<Self> {
        if data.len() != design.len() {
            return Err(contract(format!("{} observations for {} design points", data.len(), design.len())));
        }
        let order = match design.geometry() {
            Geometry::Euclidean(1) => {
                let mut idx: Vec<usize> = (0..design.len()).collect();
                let pts = design.points();
                idx.sort_by(|&a, &b| pts[a].coords[0].total_cmp(&pts[b].coords[0]));
                Some(idx)
            }
            _ => None,
        };
        Ok(Self {
            family,
            design,
            data: DVector::from_vec(data),
            method: LikelihoodMethod::Auto,
            order,
        })
    }

    pub fn with_method(mut self, method: LikelihoodMethod) -> Self {
        self.method = method;
        self
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn data(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn family(&self) -> &dyn KernelFamily {
        self.family
    }

    /// Exact Markov factorization of the exponential-kernel density on a line:
    /// `y₁ ~ N(0, σ²)` and `y_i | y_{i−1} ~ N(ρ y_{i−1}, σ²(1 − ρ²))`, `ρ = exp(−βΔ)`.
    fn markov_nll(&self, order: &[usize], sigma: f64, beta: f64) -> Result<f64> {
        let pts = self.design.points();
        let var0 = sigma * sigma;
        let ln2pi = (2.0 * std::f64::consts::PI).ln();
        let mut nll = 0.0;
        let mut prev: Option<usize> = None;
        for (pos, &i) in order.iter().enumerate() {
            let y = self.data[i];
            let (mean, var) = match prev {
                None => (0.0, var0),
                Some(j) => {
                    let gap = pts[i].coords[0] - pts[j].coords[0];
                    let rho = (-beta * gap).exp();
                    (rho * self.data[j], var0 * -(-2.0 * beta * gap).exp_m1())
                }
            };
            if !(var > 0.0) || !var.is_finite() {
                return Err(GpError::SingularGram { pivot: pos, value: var });
            }
            let r = y - mean;
            nll += 0.5 * (ln2pi + var.ln() + r * r / var);
            prev = Some(i);
        }
        Ok(nll)
    }
}

/// `−log p_θ(y)` for the Gaussian model with covariance `R_θ` on the design.
///
/// Fails with `SingularGram` when `R_θ(n)` cannot be factorized; the optimizer turns that into
/// [`PENALTY_VALUE`].
pub fn neg_log_likelihood(problem: &LikelihoodProblem<'_>, theta: &[f64]) -> Result<f64> {
    if theta.len() != problem.family.dims() {
        return Err(contract(format!(
            "theta has {} entries, family expects {}",
            theta.len(),
            problem.family.dims()
        )));
    }
    let kernel = problem.family.kernel(theta)?;
    if let (LikelihoodMethod::Auto, Some(order), CovarianceKernel::Exponential { sigma, beta }) =
        (problem.method, problem.order.as_deref(), &kernel)
    {
        return problem.markov_nll(order, *sigma, *beta);
    }
    let g = gram(&kernel, &problem.design)?;
    Ok(-gaussian_logpdf(&g, &problem.data)?)
}

/// Which coordinates the simplex moves in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// `θ = lo + (hi − lo)·logistic(u)`.
    Natural,
    /// `log θ = log lo + (log hi − log lo)·logistic(u)`; needs `lo > 0`.
    #[default]
    Log,
}

/// Optimizer settings for [`fit_mle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Number of generated starting points (box center plus quasi-random points).
    pub starts: usize,
    /// Additional caller-supplied starting points inside the box.
    pub extra_starts: Vec<Vec<f64>>,
    pub tol_x: f64,
    pub max_evals_per_start: usize,
    pub initial_step: f64,
    pub coordinates: Coordinates,
    /// Seed of the random shift applied to the quasi-random starts.
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            starts: 5,
            extra_starts: Vec::new(),
            tol_x: 1e-6,
            max_evals_per_start: 2000,
            initial_step: 0.5,
            coordinates: Coordinates::Log,
            seed: 0,
        }
    }
}

/// Maximum-likelihood estimate and search bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub theta_hat: Vec<f64>,
    pub loglik: f64,
    pub evaluations: usize,
    pub starts: usize,
    pub penalized_evaluations: usize,
    /// Every starting point tried, in order.
    pub start_points: Vec<Vec<f64>>,
    pub converged_starts: usize,
}

struct BoxMap<'s> {
    space: &'s ParamSpace,
    coords: Coordinates,
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

impl BoxMap<'_> {
    fn to_theta(&self, u: &[f64]) -> Vec<f64> {
        self.unit_to_box(&u.iter().map(|&x| logistic(x)).collect::<Vec<_>>())
    }

    /// Unit cube → box.
    fn unit_to_box(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(self.space.lower.iter().zip(&self.space.upper))
            .map(|(&w, (&lo, &hi))| {
                let t = match self.coords {
                    Coordinates::Natural => lo + (hi - lo) * w,
                    Coordinates::Log => (lo.ln() + (hi.ln() - lo.ln()) * w).exp(),
                };
                t.clamp(lo, hi)
            })
            .collect()
    }

    fn to_u(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(self.space.lower.iter().zip(&self.space.upper))
            .map(|(&t, (&lo, &hi))| {
                let w = match self.coords {
                    Coordinates::Natural => (t - lo) / (hi - lo),
                    Coordinates::Log => (t.ln() - lo.ln()) / (hi.ln() - lo.ln()),
                };
                let w = w.clamp(1e-12, 1.0 - 1e-12);
                (w / (1.0 - w)).ln()
            })
            .collect()
    }
}

const HALTON_BASES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut r = 0.0;
    let mut f = 1.0 / base as f64;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    r
}

/// Box center followed by shifted Halton points, all as points of the unit cube.
fn unit_starts(dims: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(vec![0.5; dims]);
    }
    for j in 1..count {
        out.push(
            (0..dims)
                .map(|c| {
                    let w = (radical_inverse(j as u64, HALTON_BASES[c % HALTON_BASES.len()]) + shift[c]).fract();
                    // keep starts off the boundary, where the logistic map degenerates
                    0.02 + 0.96 * w
                })
                .collect(),
        );
    }
    out
}

/// Maximizes the likelihood over the box by multistart simplex search.
///
/// Returns the best point evaluated over all starts, so `loglik` dominates every evaluated
/// point. Fails with `OptimizationFailed` when every start ends on a penalized value.
pub fn fit_mle(problem: &LikelihoodProblem<'_>, space: &ParamSpace, config: &FitConfig) -> Result<MleResult> {
    let p = problem.family.dims();
    if space.dims() != p {
        return Err(contract(format!("box has {} dimensions, family has {p}", space.dims())));
    }
    if config.coordinates == Coordinates::Log && space.lower.iter().any(|&lo| lo <= 0.0) {
        return Err(contract("log coordinates need a strictly positive lower bound"));
    }
    if config.starts == 0 && config.extra_starts.is_empty() {
        return Err(contract("no starting points"));
    }
    if !(config.tol_x > 0.0) || config.max_evals_per_start < p + 1 {
        return Err(contract("tol_x must be positive and the budget must cover the initial simplex"));
    }
    for s in &config.extra_starts {
        if !space.contains(s) {
            return Err(contract(format!("extra start {s:?} lies outside the box")));
        }
    }
    let map = BoxMap {
        space,
        coords: config.coordinates,
    };
    let mut start_points: Vec<Vec<f64>> = unit_starts(p, config.starts, config.seed)
        .iter()
        .map(|w| map.unit_to_box(w))
        .collect();
    start_points.extend(config.extra_starts.iter().cloned());

    let settings = SimplexSettings {
        initial_step: config.initial_step,
        tol_x: config.tol_x,
        max_evals: config.max_evals_per_start,
    };
    let mut penalized = 0usize;
    let mut evaluations = 0usize;
    let mut converged_starts = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &start_points {
        let run = minimize(
            |u| {
                let theta = map.to_theta(u);
                match neg_log_likelihood(problem, &theta) {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        penalized += 1;
                        PENALTY_VALUE
                    }
                }
            },
            &map.to_u(start),
            settings,
        );
        evaluations += run.evaluations;
        if run.converged {
            converged_starts += 1;
        }
        if run.best_f < PENALTY_VALUE && best.as_ref().is_none_or(|(_, f)| run.best_f < *f) {
            best = Some((run.best_x, run.best_f));
        }
    }
    let (u_best, _) = best.ok_or_else(|| {
        GpError::OptimizationFailed(format!("all {} starts ended on penalized values", start_points.len()))
    })?;
    let theta_hat = map.to_theta(&u_best);
    let loglik = -neg_log_likelihood(problem, &theta_hat)?;
    Ok(MleResult {
        theta_hat,
        loglik,
        evaluations,
        starts: start_points.len(),
        penalized_evaluations: penalized,
        start_points,
        converged_starts,
    })
}
