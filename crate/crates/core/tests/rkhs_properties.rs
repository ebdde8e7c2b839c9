mod common;

use gpequiv::kernels::{dyadic_designs, gram, sphere_designs, Design};
use gpequiv::spectral::sphere_equivalence_sum;
use gpequiv::{
    reproducing_check, rkhs_inner, tensor_norm_finite, CovarianceKernel, FiniteFunction, GramMatrix,
    SchoenbergSpectrum,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #[test]
    fn inner_product_is_bilinear_and_symmetric(
        seed in any::<u64>(),
        v in vec_strategy(6), w in vec_strategy(6), u in vec_strategy(6),
        a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let g = GramMatrix::from_matrix(common::random_spd(&mut common::rng(seed), 6, 0.5)).unwrap();
        let (v, w, u) = (DVector::from_vec(v), DVector::from_vec(w), DVector::from_vec(u));
        let lhs = rkhs_inner(&g, &(&v * a + &w * b), &u).unwrap();
        let rhs = a * rkhs_inner(&g, &v, &u).unwrap() + b * rkhs_inner(&g, &w, &u).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        let vw = rkhs_inner(&g, &v, &w).unwrap();
        let wv = rkhs_inner(&g, &w, &v).unwrap();
        prop_assert!((vw - wv).abs() <= 1e-10 * (1.0 + vw.abs()));
        let vv = rkhs_inner(&g, &v, &v).unwrap();
        let ww = rkhs_inner(&g, &w, &w).unwrap();
        prop_assert!(vw * vw <= vv * ww * (1.0 + 1e-10));
    }

    #[test]
    fn reproducing_identity_on_random_spd(seed in any::<u64>(), n in 1usize..=20) {
        let mut rng = common::rng(seed);
        let g = GramMatrix::from_matrix(common::random_spd(&mut rng, n, 0.3)).unwrap();
        let design = Design::interval(&(1..=n).map(|i| i as f64).collect::<Vec<_>>()).unwrap();
        let values: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let f = FiniteFunction::new(design, values.clone()).unwrap();
        let i = rng.random_range(0..n);
        let res = reproducing_check(&g, &f, i).unwrap();
        prop_assert!(res <= 1e-9 * (1.0 + values[i].abs()), "residual {}", res);
    }
}

#[test]
fn tensor_norm_grows_under_nesting() {
    let pairs = [
        (CovarianceKernel::exponential(1.0, 2.0).unwrap(), CovarianceKernel::exponential(2f64.sqrt(), 1.0).unwrap()),
        (CovarianceKernel::exponential(1.0, 1.0).unwrap(), CovarianceKernel::exponential(1.0, 3.0).unwrap()),
        (CovarianceKernel::brownian(1.0).unwrap(), CovarianceKernel::brownian(1.5).unwrap()),
    ];
    let designs = dyadic_designs(128).unwrap();
    for (k1, k2) in &pairs {
        let mut prev = 0.0;
        for d in &designs {
            let g1 = gram(k1, d).unwrap();
            let g2 = gram(k2, d).unwrap();
            let v = tensor_norm_finite(&g1, &(g2.entries() - g1.entries())).unwrap();
            assert!(v >= prev - 1e-9, "{k1:?} vs {k2:?}: {v} < {prev} at n = {}", d.len());
            prev = v;
        }
    }
}

/// Two spectra sharing a small positive tail and differing only for k ≤ 5.
pub fn bridge_spectra() -> (SchoenbergSpectrum, SchoenbergSpectrum) {
    let ratios = [1.3, 0.8, 1.2, 0.9, 1.25, 0.85];
    let base: Vec<f64> = (0..=30)
        .map(|k| {
            let w = 1.0 / ((k + 1) as f64).powi(2);
            if k <= 5 {
                w
            } else {
                0.01 * w
            }
        })
        .collect();
    let mut first = base.clone();
    for (k, r) in ratios.iter().enumerate() {
        first[k] *= r;
    }
    (
        SchoenbergSpectrum::new(3, first).unwrap(),
        SchoenbergSpectrum::new(3, base).unwrap(),
    )
}

#[test]
fn sphere_tensor_norm_approaches_spectral_sum_from_below() {
    let (s1, s2) = bridge_spectra();
    let bound = sphere_equivalence_sum(&s1, &s2, 30).unwrap().final_value;
    let k1 = CovarianceKernel::schoenberg(s1);
    let k2 = CovarianceKernel::schoenberg(s2);
    let mut prev = 0.0;
    for d in sphere_designs(&[10, 20, 40, 80, 160]).unwrap() {
        let g1 = gram(&k1, &d).unwrap();
        let g2 = gram(&k2, &d).unwrap();
        // measured against the second kernel, matching the orientation of the spectral sum
        let v = tensor_norm_finite(&g2, &(g2.entries() - g1.entries())).unwrap();
        assert!(v >= prev - 1e-9);
        assert!(v <= bound + 1e-6, "n = {}: {v} > {bound}", d.len());
        prev = v;
    }
}
