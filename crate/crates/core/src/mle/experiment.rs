//! Monte Carlo consistency experiment for the exponential kernel on `[0, 1]`.
//!
//! On a bounded interval the pair `(σ², β)` is not consistently estimable, but the product
//! `σ²β` is: two exponential models with equal `σ²β` give equivalent Gaussian measures, so
//! no amount of data on `[0, 1]` separates them, while different `σ²β` give orthogonal ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    fit_mle, ExponentialFamily, FitConfig, FixedRangeExponentialFamily, KernelFamily, LikelihoodMethod,
    LikelihoodProblem, ParamSpace,
};
use crate::error::{contract, GpError, Result};
use crate::kernels::{equispaced_grid, gram, CovarianceKernel};
use crate::sampler::{derive_seed, draw, replicate_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Estimate `(σ, β)` jointly.
    #[default]
    Joint,
    /// Estimate `σ` with `β` fixed at its true value.
    SigmaOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub sigma0: f64,
    pub beta0: f64,
    /// Box for `(σ, β)`; in `SigmaOnly` mode only the first coordinate is used.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub mode: EstimationMode,
    pub likelihood: LikelihoodMethod,
    /// Optimizer settings; the multistart seed is re-derived per replicate.
    pub fit: FitConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![50, 100, 200, 400],
            replicates: 50,
            seed: 7,
            sigma0: 1.0,
            beta0: 1.0,
            lower: vec![0.05, 0.05],
            upper: vec![20.0, 20.0],
            mode: EstimationMode::Joint,
            likelihood: LikelihoodMethod::Auto,
            fit: FitConfig::default(),
        }
    }
}

/// RMSE summary at one grid size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub rmse_sigma2: f64,
    pub rmse_beta: f64,
    /// RMSE of `σ̂²β̂` around `σ₀²β₀`.
    pub rmse_microergodic: f64,
    pub failed_replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    pub replicates: usize,
    pub seed: u64,
}

impl ConsistencyReport {
    pub fn total_failed(&self) -> usize {
        self.rows.iter().map(|r| r.failed_replicates).sum()
    }

    pub fn failure_rate(&self) -> f64 {
        self.total_failed() as f64 / (self.rows.len() * self.replicates) as f64
    }
}

fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

/// Simulates under `Exponential(σ₀, β₀)` on equispaced grids of `[0, 1]` and records the RMSE
/// of the ML estimates of `σ²`, `β` and `σ²β` at each grid size.
///
/// Replicate `r` at grid index `a` uses data and multistart seeds derived from
/// `(seed, a, r)`, so results do not depend on the number of threads.
pub fn microergodic_experiment(config: &ExperimentConfig) -> Result<ConsistencyReport> {
    if config.n_grid.is_empty() || config.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(contract("n_grid must be nonempty and strictly increasing"));
    }
    if config.n_grid[0] < 2 {
        return Err(contract("grid sizes must be at least 2"));
    }
    if config.replicates < 20 {
        return Err(contract(format!("need at least 20 replicates, got {}", config.replicates)));
    }
    let truth = CovarianceKernel::exponential(config.sigma0, config.beta0)?;
    let joint = ExponentialFamily;
    let sigma_only = FixedRangeExponentialFamily { beta: config.beta0 };
    let (family, space): (&dyn KernelFamily, ParamSpace) = match config.mode {
        EstimationMode::Joint => (&joint, ParamSpace::new(config.lower.clone(), config.upper.clone())?),
        EstimationMode::SigmaOnly => {
            if config.lower.is_empty() || config.upper.is_empty() {
                return Err(contract("box for sigma is missing"));
            }
            (&sigma_only, ParamSpace::new(vec![config.lower[0]], vec![config.upper[0]])?)
        }
    };
    let target_s2 = config.sigma0 * config.sigma0;
    let target_micro = target_s2 * config.beta0;

    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (a, &n) in config.n_grid.iter().enumerate() {
        let design = equispaced_grid(n)?;
        let g0 = gram(&truth, &design)?;
        let fits: Vec<Result<Vec<f64>>> = (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let key = derive_seed(config.seed, a as u64, r as u64);
                let y = draw(&g0, &mut replicate_rng(key, 0));
                let problem = LikelihoodProblem::new(family, design.clone(), y.iter().copied().collect())?
                    .with_method(config.likelihood);
                let fit = FitConfig {
                    seed: key,
                    ..config.fit.clone()
                };
                Ok(fit_mle(&problem, &space, &fit)?.theta_hat)
            })
            .collect();

        let mut err_s2 = Vec::new();
        let mut err_beta = Vec::new();
        let mut err_micro = Vec::new();
        let mut failed = 0;
        for fit in fits {
            match fit {
                Ok(theta) => {
                    let s2 = theta[0] * theta[0];
                    let beta = match config.mode {
                        EstimationMode::Joint => theta[1],
                        EstimationMode::SigmaOnly => config.beta0,
                    };
                    err_s2.push(s2 - target_s2);
                    err_beta.push(beta - config.beta0);
                    err_micro.push(s2 * beta - target_micro);
                }
                Err(GpError::OptimizationFailed(_)) => failed += 1,
                Err(e) => return Err(e),
            }
        }
        rows.push(ConsistencyRow {
            n,
            rmse_sigma2: rmse(&err_s2),
            rmse_beta: rmse(&err_beta),
            rmse_microergodic: rmse(&err_micro),
            failed_replicates: failed,
        });
    }
    Ok(ConsistencyReport {
        rows,
        replicates: config.replicates,
        seed: config.seed,
    })
}
