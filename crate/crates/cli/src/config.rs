//! JSON run configurations, one document per run.

use std::path::{Path, PathBuf};

use gpequiv::kernels::{dyadic_designs, equispaced_grid, sphere_designs, sphere_spiral_points, Design, Geometry};
use gpequiv::mle::ExperimentConfig;
use gpequiv::{CovarianceKernel, DimensionModel, Point, RatioModel, SchoenbergSpectrum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Raw config bytes plus the directory relative paths are resolved against.
pub struct Loaded<T> {
    pub value: T,
    pub bytes: Vec<u8>,
    pub base: PathBuf,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<Loaded<T>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { value, bytes, base })
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Nested designs for a divergence trace.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NestedDesigns {
    /// Dyadic points of `[0, 1]` at sizes 2, 4, …, `max_n`.
    Dyadic { max_n: usize },
    /// Spiral points of `S²` at sizes `start_n`, `2·start_n`, … up to `max_n`.
    Sphere { start_n: usize, max_n: usize },
}

impl NestedDesigns {
    pub fn build(&self) -> CliResult<Vec<Design>> {
        match *self {
            NestedDesigns::Dyadic { max_n } => Ok(dyadic_designs(max_n)?),
            NestedDesigns::Sphere { start_n, max_n } => {
                if start_n == 0 || start_n > max_n {
                    return Err(CliError::Config(format!("need 1 <= start_n <= max_n, got {start_n} and {max_n}")));
                }
                let mut sizes = vec![start_n];
                while let Some(next) = sizes.last().unwrap().checked_mul(2).filter(|&n| n <= max_n) {
                    sizes.push(next);
                }
                Ok(sphere_designs(&sizes)?)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JdivConfig {
    pub first: CovarianceKernel,
    pub second: CovarianceKernel,
    pub design: NestedDesigns,
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Schoenberg coefficients given explicitly or as `a(k) = (k+1)^(−power_decay)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub coeffs: Option<Vec<f64>>,
    pub power_decay: Option<f64>,
}

impl SpectrumSpec {
    fn coefficients(&self, k_max: usize) -> CliResult<Vec<f64>> {
        match (&self.coeffs, self.power_decay) {
            (Some(c), None) => Ok(c.clone()),
            (None, Some(p)) if p.is_finite() => Ok((0..=k_max).map(|k| ((k + 1) as f64).powf(-p)).collect()),
            _ => Err(CliError::Config("a spectrum needs exactly one of coeffs or power_decay".into())),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    pub d: usize,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub second: SpectrumSpec,
    /// Omitted means `a₁(k) = a₂(k)·r(k)` from the ratio model.
    pub first: Option<SpectrumSpec>,
    pub ratio_model: Option<RatioModel>,
    #[serde(default)]
    pub seed: u64,
}

impl SphereConfig {
    pub fn spectra(&self) -> CliResult<(SchoenbergSpectrum, SchoenbergSpectrum)> {
        let second = self.second.coefficients(self.k_max)?;
        let first = match (&self.first, &self.ratio_model) {
            (Some(spec), _) => spec.coefficients(self.k_max)?,
            (None, Some(m)) => second.iter().enumerate().map(|(k, a)| a * m.ratio(k)).collect(),
            (None, None) => return Err(CliError::Config("give first or ratio_model".into())),
        };
        Ok((SchoenbergSpectrum::new(self.d, first)?, SchoenbergSpectrum::new(self.d, second)?))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChowConfig {
    /// Paths of `{"atoms": [...]}` files, relative to the config file.
    pub first: PathBuf,
    pub second: PathBuf,
    #[serde(rename = "N")]
    pub n_max: usize,
    pub ratio_model: Option<RatioModel>,
    #[serde(default = "unit_dims")]
    pub dimension_model: DimensionModel,
    #[serde(default)]
    pub seed: u64,
}

fn unit_dims() -> DimensionModel {
    DimensionModel::Constant(1)
}

/// A single design for sampling.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DesignSpec {
    /// `n` equispaced points of `[0, 1]`, endpoints included.
    Grid { n: usize },
    /// Explicit locations on the line.
    Points { locations: Vec<f64> },
    /// First `n` spiral points of `S²`.
    Sphere { n: usize },
}

impl DesignSpec {
    pub fn build(&self) -> CliResult<Design> {
        Ok(match self {
            DesignSpec::Grid { n } => equispaced_grid(*n)?,
            DesignSpec::Points { locations } => Design::interval(locations)?,
            DesignSpec::Sphere { n } => Design::new(Geometry::Sphere(3), sphere_spiral_points(*n))?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub kernel: CovarianceKernel,
    pub design: DesignSpec,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub jitter: f64,
}

pub type MleConfig = ExperimentConfig;

/// Sidecar describing a sample batch.
#[derive(Debug, serde::Serialize)]
pub struct SampleSidecar<'a> {
    pub seed: u64,
    pub replicates: usize,
    pub kernel: &'a CovarianceKernel,
    pub geometry: Geometry,
    pub points: &'a [Point],
    pub jitter: f64,
}
