//! Seeded simulation of centered Gaussian vectors.
//!
//! Replicate `i` of a batch draws its standard normals from a ChaCha8 stream keyed by
//! `(seed, i)` and maps them through the lower Cholesky factor. The stream assignment makes
//! the output independent of how replicates are scheduled across threads.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::kernels::GramMatrix;

/// `m` replicates of an `n`-dimensional centered Gaussian vector, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub samples: DMatrix<f64>,
    pub seed: u64,
}

impl SampleBatch {
    pub fn replicates(&self) -> usize {
        self.samples.nrows()
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.samples.row(i).transpose()
    }
}

/// Generator for replicate `index` under `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 mix of `(seed, a, b)`, used to key nested experiment loops.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ a) ^ b)
}

/// One draw `L·z` with `z` standard normal from `rng`.
pub fn draw<R: Rng + ?Sized>(g: &GramMatrix, rng: &mut R) -> DVector<f64> {
    let n = g.n();
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let l = g.chol();
    DVector::from_fn(n, |i, _| {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[(i, k)] * z[k];
        }
        s
    })
}

/// Draws `m` independent replicates of `N(0, R(n))`.
pub fn sample_paths(g: &GramMatrix, m: usize, seed: u64) -> Result<SampleBatch> {
    if m == 0 {
        return Err(contract("need at least one replicate"));
    }
    let rows: Vec<DVector<f64>> = (0..m)
        .into_par_iter()
        .map(|i| draw(g, &mut replicate_rng(seed, i as u64)))
        .collect();
    let n = g.n();
    let samples = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    Ok(SampleBatch { samples, seed })
}

/// `(1/m)·Σᵢ yᵢ yᵢᵀ`; the model is centered, so no mean is subtracted.
pub fn empirical_covariance(batch: &SampleBatch) -> Result<DMatrix<f64>> {
    let m = batch.replicates();
    if m < 2 {
        return Err(contract(format!("need at least two replicates, got {m}")));
    }
    let n = batch.dim();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for r in 0..m {
        for i in 0..n {
            let yi = batch.samples[(r, i)];
            for j in 0..=i {
                c[(i, j)] += yi * batch.samples[(r, j)];
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = c[(i, j)] / m as f64;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}
