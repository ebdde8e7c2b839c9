#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `B Bᵀ / n + shift·I` with standard normal `B`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let a = &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * shift;
    // exact symmetry
    DMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] })
}

/// Dense symmetrized KL divergence via LU inverses and determinants.
pub fn kl_sum_oracle(r1: &DMatrix<f64>, r2: &DMatrix<f64>) -> f64 {
    let n = r1.nrows() as f64;
    let inv1 = r1.clone().try_inverse().unwrap();
    let inv2 = r2.clone().try_inverse().unwrap();
    let ld1 = r1.clone().lu().determinant().ln();
    let ld2 = r2.clone().lu().determinant().ln();
    let kl12 = 0.5 * ((&inv2 * r1).trace() - n + ld2 - ld1);
    let kl21 = 0.5 * ((&inv1 * r2).trace() - n + ld1 - ld2);
    kl12 + kl21
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}
