//! Command-line front end: each subcommand reads one JSON config and writes CSV/JSON outputs
//! plus a `manifest.json` into the output directory.
//!
//! Exit codes: 0 success, 1 output i/o failure, 2 malformed or invalid config,
//! 3 singular Gram matrix, 4 atom mismatch (measures orthogonal), 5 optimization failures.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_chow, cmd_jdiv, cmd_mle, cmd_sample, cmd_sphere, RunOptions};
pub use error::{CliError, CliResult};
pub use output::RunManifest;

macro_rules! kernel_keys {
    () => {
        "Kernels are objects tagged by \"variant\":
  {\"variant\": \"brownian\", \"sigma\": s}                   sigma^2 min(s, t) on [0, inf)
  {\"variant\": \"exponential\", \"sigma\": s, \"beta\": b}      sigma^2 exp(-beta |s - t|)
  {\"variant\": \"schoenberg\", \"d\": d, \"coeffs\": [a0, ...]}  isotropic kernel on S^(d-1)"
    };
}

const EXIT_CODES: &str = "Exit codes: 0 ok, 1 i/o, 2 config, 3 singular Gram, 4 atom mismatch, 5 optimization failure.";

#[derive(Debug, Parser)]
#[command(name = "gpequiv", version, about = "Equivalence and orthogonality diagnostics for Gaussian processes")]
#[command(after_help = EXIT_CODES)]
pub struct Cli {
    /// Size of the worker thread pool (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file; relative paths inside it are resolved against its directory.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the seed given in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// J-divergence trace over nested designs; writes trace.csv and verdict.json.
    #[command(after_help = JDIV_HELP)]
    Jdiv(CommonArgs),
    /// Degree-wise equivalence sum for two isotropic sphere kernels; writes criterion.csv and verdict.json.
    #[command(after_help = SPHERE_HELP)]
    Sphere(CommonArgs),
    /// Atom-ratio sum for two atomic spectral measures; writes criterion.csv and verdict.json.
    #[command(after_help = CHOW_HELP)]
    Chow(CommonArgs),
    /// Gaussian sample paths on a design; writes samples.csv and samples.json.
    #[command(after_help = SAMPLE_HELP)]
    Sample(CommonArgs),
    /// Maximum-likelihood consistency experiment for the exponential kernel; writes consistency.csv.
    #[command(after_help = MLE_HELP)]
    Mle(CommonArgs),
}

const JDIV_HELP: &str = concat!(
    "Config keys:
  first, second  kernels to compare
  design         {\"kind\": \"dyadic\", \"max_n\": n}: dyadic points of [0, 1] at sizes 2, 4, ..., max_n
                 {\"kind\": \"sphere\", \"start_n\": a, \"max_n\": b}: spiral points of S^2 at sizes a, 2a, ... <= b
  jitter         diagonal term added to both Gram matrices (default 0)
  seed           recorded in the manifest (default 0)

trace.csv columns: n,J,slope_estimate (slope over the trace up to that row).

",
    kernel_keys!()
);

const SAMPLE_HELP: &str = concat!(
    "Config keys:
  kernel      kernel to sample from
  design      {\"kind\": \"grid\", \"n\": n}: n equispaced points of [0, 1]
              {\"kind\": \"points\", \"locations\": [x, ...]}: explicit points on the line
              {\"kind\": \"sphere\", \"n\": n}: first n spiral points of S^2
  replicates  number of sample paths, one CSV row each
  seed        base seed; replicate i uses stream i (default 0)
  jitter      diagonal term added to the Gram matrix (default 0)

",
    kernel_keys!()
);

const SPHERE_HELP: &str = "Config keys:
  d            ambient dimension; the sphere is S^(d-1), d >= 3
  K            last degree summed
  second       reference spectrum: {\"coeffs\": [...]} or {\"power_decay\": p} for a(k) = (k+1)^-p, k <= K
  first        compared spectrum, same forms; omit to derive it as second(k) * r(k) from ratio_model
  ratio_model  optional {\"scale\": c, \"exponent\": s}: r(k) = 1 + c (k+1)^-s, checked against the
               coefficients and used to bound the tail (without it the verdict is Finite only for
               finite lists covered by K)
  seed         recorded in the manifest (default 0)

criterion.csv columns: k,term,partial_sum. Spectra with different supports exit with code 4.";

const CHOW_HELP: &str = "Config keys:
  first, second    paths of {\"atoms\": [{\"label\": ..., \"mass\": m, \"dim\": d}, ...]} files
  N                number of leading atoms summed
  ratio_model      optional {\"scale\": c, \"exponent\": s}: mass ratio 1 + c n^-s at atom n
  dimension_model  {\"kind\": \"constant\", \"value\": d} (default d = 1) or {\"kind\": \"sphere\", \"value\": d}
                   for harmonic dimensions on S^(d-1); used with ratio_model for the tail bound
  seed             recorded in the manifest (default 0)

criterion.csv columns: n,partial_sum. Atoms are matched by position and must carry equal labels;
a mismatch exits with code 4.";

const MLE_HELP: &str = "Config keys (all optional):
  n_grid      increasing grid sizes on [0, 1] (default [50, 100, 200, 400])
  replicates  replicates per grid size, at least 20 (default 50)
  seed        base seed (default 7)
  sigma0      true sigma (default 1)
  beta0       true beta (default 1)
  lower       lower box corner for (sigma, beta) (default [0.05, 0.05])
  upper       upper box corner for (sigma, beta) (default [20, 20])
  mode        \"joint\" fits (sigma, beta); \"sigma_only\" fixes beta at beta0 (default joint)
  likelihood  \"auto\" uses the exact Markov form of the exponential likelihood, \"dense\" a full
              Cholesky factorization (default auto)
  fit         optimizer settings:
    starts               multistart points: box center plus quasi-random points (default 5)
    extra_starts         additional starting points (default [])
    tol_x                simplex diameter at which a start stops (default 1e-6)
    max_evals_per_start  evaluation budget per start (default 2000)
    initial_step         initial simplex step in transformed coordinates (default 0.5)
    coordinates          \"log\" or \"natural\" box coordinates (default log)
    seed                 ignored; re-derived per replicate

consistency.csv columns: n,rmse_sigma2,rmse_beta,rmse_microergodic,failed_replicates.
Exits with code 5 when more than 20% of replicates fail to optimize.";

/// Runs the parsed command and returns the process exit code, reporting errors on stderr.
pub fn run(cli: Cli) -> i32 {
    let pool = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let (cmd, args): (fn(&RunOptions) -> CliResult<()>, &CommonArgs) = match &cli.command {
        Command::Jdiv(a) => (cmd_jdiv, a),
        Command::Sphere(a) => (cmd_sphere, a),
        Command::Chow(a) => (cmd_chow, a),
        Command::Sample(a) => (cmd_sample, a),
        Command::Mle(a) => (cmd_mle, a),
    };
    let opts = RunOptions {
        config: args.config.clone(),
        out: args.out.clone(),
        seed: args.seed,
    };
    match pool.install(|| cmd(&opts)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
