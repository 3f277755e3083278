//! Property tests for the displacement identities and estimator invariants
//! on Haar-random matrices.

use proptest::prelude::*;

use unidioph_core::dirichlet::delta_jk;
use unidioph_core::displacement::{phi_empirical, phi_unitary, phi_value, rho};
use unidioph_core::haar::{
    haar_sample, phi_distribution_mc, phi_lower_bound, w_of_t, weyl_phi_quadrature,
};
use unidioph_core::linalg::{matrix_power, unitarity_tol, UnitaryMatrix};

fn two_sample_ks(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phi_symmetry_under_inverse(seed in 0u64..1_000_000, n in 1usize..=3) {
        let a = haar_sample(n, seed).unwrap();
        prop_assert!((phi_value(&a) - phi_value(&a.adjoint())).abs() < 1e-10);
    }

    #[test]
    fn phi_subadditivity_and_reverse_triangle(seed in 0u64..1_000_000, n in 1usize..=3) {
        let a = haar_sample(n, seed).unwrap();
        let b = haar_sample(n, seed.wrapping_add(0x9e3779b9)).unwrap();
        let quotient = phi_value(&a.compose(&b.adjoint()).unwrap());
        prop_assert!(quotient <= phi_value(&a) + phi_value(&b) + 1e-9);
        prop_assert!((phi_value(&a) - phi_value(&b)).abs() <= quotient + 1e-9);
    }

    #[test]
    fn rho_metric_axioms(seed in 0u64..1_000_000, n in 1usize..=3) {
        let a = haar_sample(n, seed).unwrap();
        let b = haar_sample(n, seed ^ 0xabcd).unwrap();
        let c = haar_sample(n, seed ^ 0x1234_5678).unwrap();
        let ab = rho(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - rho(&b, &a).unwrap()).abs() < 1e-10);
        prop_assert!(ab <= rho(&a, &c).unwrap() + rho(&c, &b).unwrap() + 1e-9);
        prop_assert!(rho(&a, &a).unwrap() <= 1e-8);
    }

    #[test]
    fn phi_conjugation_and_commutation(seed in 0u64..1_000_000, n in 1usize..=3) {
        let a = haar_sample(n, seed).unwrap();
        let b = haar_sample(n, seed ^ 0xff00ff).unwrap();
        let conj = b.compose(&a).unwrap().compose(&b.adjoint()).unwrap();
        prop_assert!((phi_value(&conj) - phi_value(&a)).abs() < 1e-9);
        let ab = phi_value(&a.compose(&b).unwrap());
        let ba = phi_value(&b.compose(&a).unwrap());
        prop_assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn sampled_sup_never_exceeds_spectral_value(seed in 0u64..1_000_000, n in 1usize..=4) {
        let a = haar_sample(n, seed).unwrap();
        let spectral = phi_unitary(&a).unwrap();
        let sampled = phi_empirical(&a, 500, seed ^ 0xbeef);
        prop_assert!(sampled <= spectral.value + 1e-9);
        // The witness attains the sup exactly.
        let w = spectral.witness.unwrap();
        let m = a.matrix();
        let mut moved = 0.0;
        for i in 0..n {
            let mut ax = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..n {
                ax += m.get(i, j) * w[j];
            }
            moved += (ax - w[i]).norm_sqr();
        }
        prop_assert!((moved.sqrt() - spectral.value).abs() < 1e-9);
    }

    #[test]
    fn unitarity_certificate_survives_composition(seed in 0u64..1_000_000, n in 1usize..=3) {
        let a = haar_sample(n, seed).unwrap();
        let mut acc = UnitaryMatrix::identity(n);
        for _ in 0..20 {
            acc = acc.compose(&a).unwrap();
        }
        prop_assert!(acc.residual() <= unitarity_tol(n));
        let p = matrix_power(&a, 987).unwrap();
        prop_assert!(p.residual() <= unitarity_tol(n));
    }

    #[test]
    fn word_search_determinism(seed in 0u64..100_000) {
        let a = haar_sample(2, seed).unwrap();
        let b = haar_sample(2, !seed).unwrap();
        let r1 = delta_jk(&a, &b, 3, 3).unwrap();
        let r2 = delta_jk(&a, &b, 3, 3).unwrap();
        prop_assert_eq!(r1.delta.to_bits(), r2.delta.to_bits());
        prop_assert_eq!(r1.argmin, r2.argmin);
        prop_assert_eq!(r1.evaluations, r2.evaluations);
    }
}

#[test]
fn haar_translation_invariance_smoke() {
    // φ(UA₀) over Haar U must be distributed like φ(U): right translation
    // invariance of the sampler, checked with a two-sample KS statistic.
    let n = 2;
    let a0 = haar_sample(n, 777).unwrap();
    let mut plain = Vec::with_capacity(10_000);
    let mut translated = Vec::with_capacity(10_000);
    let mut rng1 = unidioph_core::rng::seeded_rng(101, 0);
    let mut rng2 = unidioph_core::rng::seeded_rng(202, 0);
    for _ in 0..10_000 {
        let u = unidioph_core::haar::haar_sample_with_rng(n, &mut rng1).unwrap();
        plain.push(phi_value(&u));
        let v = unidioph_core::haar::haar_sample_with_rng(n, &mut rng2).unwrap();
        translated.push(phi_value(&v.compose(&a0).unwrap()));
    }
    let d = two_sample_ks(&mut plain, &mut translated);
    assert!(d < 0.02, "two-sample KS statistic {d}");
}

#[test]
fn distribution_monotone_in_threshold() {
    // Same seed for every threshold means the same sample set, so the hit
    // count is exactly monotone.
    for n in [1usize, 2] {
        let mut last = -1.0;
        for i in 0..=10 {
            let t = 0.2 * i as f64;
            let est = phi_distribution_mc(n, t, 2_000, 99).unwrap();
            assert!(est.estimate >= last, "N={n}, t={t}");
            last = est.estimate;
        }
    }
}

#[test]
fn lower_bound_chain_through_quadrature() {
    // (t/π)^{N²} ≤ (2w)^{N²} ≤ quadrature Φ(t), the inequality chain behind
    // the pigeonhole bound, evaluated deterministically.
    for n in [1usize, 2] {
        for i in 1..=10 {
            let t = 0.2 * i as f64;
            let w = w_of_t(t).unwrap();
            let quad = weyl_phi_quadrature(n, t, 96).unwrap();
            let pow = (n * n) as i32;
            assert!(
                (t / std::f64::consts::PI).powi(pow) <= (2.0 * w).powi(pow) + 1e-12,
                "N={n} t={t}"
            );
            assert!(
                (2.0 * w).powi(pow) <= quad + 1e-9,
                "N={n} t={t}: (2w)^{{N²}} = {} vs quadrature {quad}",
                (2.0 * w).powi(pow)
            );
            assert!(phi_lower_bound(n, t).unwrap() <= quad + 1e-9);
        }
    }
}
