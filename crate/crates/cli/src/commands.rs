use std::path::PathBuf;

use gpequiv::kernels::gram_with_jitter;
use gpequiv::mle::microergodic_experiment;
use gpequiv::sampler::sample_paths;
use gpequiv::spectral::{chow_sum_with_model, sphere_equivalence_sum_with_model};
use gpequiv::{
    check_shared_atoms, chow_sum, dichotomy_diagnostic, sphere_equivalence_sum, AtomicSpectralMeasure,
    CriterionResult, DichotomyVerdict, SeriesVerdict,
};
use gpequiv::divergence::j_divergence_trace_with_jitter;
use serde::Serialize;

use crate::config::{self, ChowConfig, JdivConfig, MleConfig, SampleConfig, SampleSidecar, SphereConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, OutDir, RunManifest};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    /// Overrides the config's seed when set.
    pub seed: Option<u64>,
}

fn start(name: &str, opts: &RunOptions, bytes: &[u8], seed: u64) -> CliResult<OutDir> {
    let out = OutDir::create(&opts.out)?;
    out.write_json("manifest.json", &RunManifest::new(name, bytes, seed))?;
    Ok(out)
}

#[derive(Serialize)]
struct JdivSummary<'a> {
    verdict: &'a DichotomyVerdict,
    n_max: usize,
    j_last: f64,
    slope_estimate: f64,
}

pub fn cmd_jdiv(opts: &RunOptions) -> CliResult<()> {
    let cfg = config::load::<JdivConfig>(&opts.config)?;
    let c = &cfg.value;
    let out = start("jdiv", opts, &cfg.bytes, opts.seed.unwrap_or(c.seed))?;
    let designs = c.design.build()?;
    let trace = j_divergence_trace_with_jitter(&c.first, &c.second, &designs, c.jitter)?;
    let verdict = dichotomy_diagnostic(&trace)?;
    let slopes = trace.running_slopes();
    out.write_csv(
        "trace.csv",
        &["n", "J", "slope_estimate"],
        trace
            .sizes
            .iter()
            .zip(&trace.values)
            .zip(&slopes)
            .map(|((n, j), s)| vec![n.to_string(), num(*j), num(*s)]),
    )?;
    out.write_json(
        "verdict.json",
        &JdivSummary {
            verdict: &verdict,
            n_max: *trace.sizes.last().unwrap(),
            j_last: *trace.values.last().unwrap(),
            slope_estimate: trace.slope_estimate,
        },
    )
}

#[derive(Serialize)]
struct SeriesSummary {
    verdict: SeriesVerdict,
    #[serde(rename = "final")]
    final_value: f64,
    tail_bound: Option<f64>,
    terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    shared_atoms: Option<bool>,
}

impl SeriesSummary {
    fn of(r: &CriterionResult) -> Self {
        Self {
            verdict: r.verdict,
            final_value: r.final_value,
            tail_bound: r.tail_bound,
            terms: r.terms.len(),
            shared_atoms: None,
        }
    }
}

pub fn cmd_sphere(opts: &RunOptions) -> CliResult<()> {
    let cfg = config::load::<SphereConfig>(&opts.config)?;
    let c = &cfg.value;
    let out = start("sphere", opts, &cfg.bytes, opts.seed.unwrap_or(c.seed))?;
    let (s1, s2) = c.spectra()?;
    let res = match &c.ratio_model {
        Some(m) => sphere_equivalence_sum_with_model(&s1, &s2, c.k_max, m)?,
        None => sphere_equivalence_sum(&s1, &s2, c.k_max)?,
    };
    out.write_csv(
        "criterion.csv",
        &["k", "term", "partial_sum"],
        res.indices
            .iter()
            .zip(&res.terms)
            .zip(&res.partial_sums)
            .map(|((k, t), s)| vec![k.to_string(), num(*t), num(*s)]),
    )?;
    out.write_json("verdict.json", &SeriesSummary::of(&res))
}

fn load_measure(base: &std::path::Path, p: &std::path::Path) -> CliResult<AtomicSpectralMeasure> {
    Ok(config::load::<AtomicSpectralMeasure>(&config::resolve(base, p))?.value)
}

pub fn cmd_chow(opts: &RunOptions) -> CliResult<()> {
    let cfg = config::load::<ChowConfig>(&opts.config)?;
    let c = &cfg.value;
    let out = start("chow", opts, &cfg.bytes, opts.seed.unwrap_or(c.seed))?;
    let m1 = load_measure(&cfg.base, &c.first)?;
    let m2 = load_measure(&cfg.base, &c.second)?;
    let res = match &c.ratio_model {
        Some(m) => chow_sum_with_model(&m1, &m2, c.n_max, m, c.dimension_model)?,
        None => chow_sum(&m1, &m2, c.n_max)?,
    };
    out.write_csv(
        "criterion.csv",
        &["n", "partial_sum"],
        res.indices
            .iter()
            .zip(&res.partial_sums)
            .map(|(n, s)| vec![n.to_string(), num(*s)]),
    )?;
    let mut summary = SeriesSummary::of(&res);
    summary.shared_atoms = Some(check_shared_atoms(&m1, &m2));
    out.write_json("verdict.json", &summary)
}

pub fn cmd_sample(opts: &RunOptions) -> CliResult<()> {
    let cfg = config::load::<SampleConfig>(&opts.config)?;
    let c = &cfg.value;
    let seed = opts.seed.unwrap_or(c.seed);
    let out = start("sample", opts, &cfg.bytes, seed)?;
    if c.replicates == 0 {
        return Err(CliError::Config("replicates must be at least 1".into()));
    }
    let design = c.design.build()?;
    let g = gram_with_jitter(&c.kernel, &design, c.jitter)?;
    let batch = sample_paths(&g, c.replicates, seed)?;
    let header: Vec<String> = (0..design.len()).map(|j| format!("p{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_csv(
        "samples.csv",
        &header,
        (0..batch.replicates()).map(|i| batch.samples.row(i).iter().map(|v| num(*v)).collect()),
    )?;
    out.write_json(
        "samples.json",
        &SampleSidecar {
            seed,
            replicates: c.replicates,
            kernel: &c.kernel,
            geometry: design.geometry(),
            points: design.points(),
            jitter: c.jitter,
        },
    )
}

/// Largest tolerated share of replicates whose optimization failed.
pub const MAX_FAILURE_RATE: f64 = 0.2;

pub fn cmd_mle(opts: &RunOptions) -> CliResult<()> {
    let cfg = config::load::<MleConfig>(&opts.config)?;
    let mut c = cfg.value.clone();
    if let Some(s) = opts.seed {
        c.seed = s;
    }
    let out = start("mle", opts, &cfg.bytes, c.seed)?;
    let report = microergodic_experiment(&c)?;
    out.write_csv(
        "consistency.csv",
        &["n", "rmse_sigma2", "rmse_beta", "rmse_microergodic", "failed_replicates"],
        report.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                num(r.rmse_sigma2),
                num(r.rmse_beta),
                num(r.rmse_microergodic),
                r.failed_replicates.to_string(),
            ]
        }),
    )?;
    if report.failure_rate() > MAX_FAILURE_RATE {
        return Err(CliError::TooManyFailures {
            failed: report.total_failed(),
            total: report.rows.len() * report.replicates,
        });
    }
    Ok(())
}
