mod common;

use gpequiv::kernels::{gram, sphere_designs, Design, Geometry, Point};
use gpequiv::{eval_kernel, harmonic_dimension, CovarianceKernel, SchoenbergSpectrum};
use proptest::prelude::*;

fn spectrum() -> impl Strategy<Value = SchoenbergSpectrum> {
    (3usize..=5, prop::collection::vec(0.0f64..2.0, 1..12))
        .prop_map(|(d, coeffs)| SchoenbergSpectrum::new(d, coeffs).unwrap())
}

proptest! {
    #[test]
    fn scalar_kernels_are_symmetric(s in 0.0f64..5.0, t in 0.0f64..5.0, sigma in 0.1f64..3.0, beta in 0.1f64..10.0) {
        for k in [CovarianceKernel::brownian(sigma).unwrap(), CovarianceKernel::exponential(sigma, beta).unwrap()] {
            let (ps, pt) = (Point::scalar(s), Point::scalar(t));
            prop_assert_eq!(eval_kernel(&k, &ps, &pt).unwrap(), eval_kernel(&k, &pt, &ps).unwrap());
        }
    }

    #[test]
    fn schoenberg_kernels_are_symmetric(spec in spectrum(), seed in any::<u64>()) {
        let d = spec.sphere_dim();
        let mut rng = common::rng(seed);
        let s = Point::new(common::random_unit_vector(&mut rng, d));
        let t = Point::new(common::random_unit_vector(&mut rng, d));
        let k = CovarianceKernel::schoenberg(spec);
        prop_assert_eq!(eval_kernel(&k, &s, &t).unwrap(), eval_kernel(&k, &t, &s).unwrap());
    }

    #[test]
    fn gram_factor_reconstructs(locs in prop::collection::btree_set(0u32..10_000, 1..40), beta in 0.2f64..20.0) {
        let locs: Vec<f64> = locs.into_iter().map(|x| x as f64 / 10_000.0 + 1e-3).collect();
        let design = Design::interval(&locs).unwrap();
        for k in [CovarianceKernel::exponential(1.3, beta).unwrap(), CovarianceKernel::brownian(0.7).unwrap()] {
            let g = gram(&k, &design).unwrap();
            let rec = g.chol() * g.chol().transpose();
            let err = (rec - g.entries()).amax() / g.entries().amax();
            prop_assert!(err <= 1e-10, "relative reconstruction error {}", err);
            let ld: f64 = 2.0 * g.chol().diagonal().iter().map(|x| x.ln()).sum::<f64>();
            prop_assert_eq!(ld, g.log_det());
        }
    }
}

#[test]
fn schoenberg_diagonal_equals_trace_value() {
    let mut rng = common::rng(17);
    for d in [3usize, 4, 5] {
        let coeffs: Vec<f64> = (0..25).map(|k| 1.0 / (1.0 + k as f64).powi(3)).collect();
        let spec = SchoenbergSpectrum::new(d, coeffs.clone()).unwrap();
        // oracle: Σ h(k) a(k) with integer harmonic dimensions
        let oracle: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * harmonic_dimension(d, k).unwrap() as f64)
            .sum();
        let kernel = CovarianceKernel::schoenberg(spec);
        for _ in 0..100 {
            let t = Point::new(common::random_unit_vector(&mut rng, d));
            let v = eval_kernel(&kernel, &t, &t).unwrap();
            assert!((v - oracle).abs() <= 1e-10 * oracle, "d={d}: {v} vs {oracle}");
        }
    }
}

#[test]
fn schoenberg_legendre_expansion_matches_closed_form() {
    // On S^2 the Poisson-type kernel Σ (2k+1) r^k P_k(x) = (1 − r²)/(1 − 2rx + r²)^{3/2}.
    let r: f64 = 0.5;
    let coeffs: Vec<f64> = (0..80).map(|k| r.powi(k)).collect();
    let kernel = CovarianceKernel::schoenberg(SchoenbergSpectrum::new(3, coeffs).unwrap());
    let s = Point::new(vec![0.0, 0.0, 1.0]);
    for theta in [0.0f64, 0.4, 1.3, 2.9] {
        let t = Point::new(vec![theta.sin(), 0.0, theta.cos()]);
        let x = theta.cos();
        let closed = (1.0 - r * r) / (1.0 - 2.0 * r * x + r * r).powf(1.5);
        let v = eval_kernel(&kernel, &s, &t).unwrap();
        assert!((v - closed).abs() < 1e-12 * closed, "theta={theta}");
    }
}

#[test]
fn sphere_gram_is_spd_for_rich_spectrum() {
    let coeffs: Vec<f64> = (0..=30).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect();
    let kernel = CovarianceKernel::schoenberg(SchoenbergSpectrum::new(3, coeffs).unwrap());
    let design = sphere_designs(&[100]).unwrap().pop().unwrap();
    assert_eq!(design.geometry(), Geometry::Sphere(3));
    let g = gram(&kernel, &design).unwrap();
    let eig = nalgebra::SymmetricEigen::new(g.entries().clone()).eigenvalues;
    assert!(eig.iter().all(|&l| l > 0.0));
}
