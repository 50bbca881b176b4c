//! Cross-checks of the fast special functions against the slow reference
//! implementations, plus the invariants they are relied on for.

use multiguard::numerics::{
    beta_quantile, gaussian_cdf, gaussian_quantile, regularized_incomplete_beta, Probability,
};
use multiguard_reference as reference;
use proptest::prelude::*;

fn p(v: f64) -> Probability<f64> {
    Probability::new(v).unwrap()
}

#[test]
fn cdf_matches_the_series_oracle() {
    // Dense sweep plus the documented reference point.
    let mut z = -8.0;
    while z <= 8.0 {
        let fast = gaussian_cdf(z).unwrap().value();
        let slow = reference::normal_cdf(z);
        assert!((fast - slow).abs() < 1e-13, "z = {z}: {fast} vs {slow}");
        z += 0.0625;
    }
    let fast: f64 = gaussian_cdf(1.959964_f64).unwrap().value();
    assert!((fast - 0.975).abs() < 1e-6);
    assert!((fast - reference::normal_cdf(1.959964)).abs() < 1e-14);
}

#[test]
fn quantile_matches_the_bisection_oracle() {
    for &q in &[1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-7] {
        let fast = gaussian_quantile(p(q));
        let slow = reference::normal_quantile(q);
        assert!((fast - slow).abs() < 1e-8, "q = {q}: {fast} vs {slow}");
    }
    let fast = gaussian_quantile(p(0.975));
    assert!((fast - 1.959964).abs() < 1e-6);
}

#[test]
fn cdf_quantile_round_trip_within_1e10() {
    // Contract: |cdf(quantile(p)) - p| <= 1e-10 on [1e-12, 1 - 1e-12].
    let mut worst = 0.0_f64;
    let mut check = |q: f64| {
        let err = (gaussian_cdf(gaussian_quantile(p(q))).unwrap().value() - q).abs();
        worst = worst.max(err);
    };
    for i in 1..=999 {
        check(i as f64 / 1000.0);
    }
    for &q in &[1e-12, 1e-9, 1e-6, 1e-3, 1.0 - 1e-3, 1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12] {
        check(q);
    }
    assert!(worst <= 1e-10, "worst round-trip error {worst}");
}

#[test]
fn incomplete_beta_matches_the_quadrature_oracle() {
    // t^2 (1-t)^7 normalized, integrated by adaptive quadrature.
    let fast = regularized_incomplete_beta(0.2, 3.0, 8.0).unwrap().value();
    let slow = reference::beta_cdf(0.2, 3.0, 8.0);
    assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");

    for &(x, a, b) in &[
        (0.01, 1.0, 9.0),
        (0.37, 2.5, 4.0),
        (0.62, 12.0, 3.0),
        (0.5, 40.0, 40.0),
        (0.899, 900.0, 101.0),
        (0.95, 1.0, 1.0),
    ] {
        let fast = regularized_incomplete_beta(x, a, b).unwrap().value();
        let slow = reference::beta_cdf(x, a, b);
        assert!(
            (fast - slow).abs() < 1e-9,
            "I_{x}({a},{b}): {fast} vs {slow}"
        );
    }
}

#[test]
fn beta_quantile_matches_the_quadrature_oracle() {
    let fast = beta_quantile(p(0.05), 3.0, 8.0).unwrap().value();
    let slow = reference::beta_quantile(0.05, 3.0, 8.0);
    assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");

    // The Clopper-Pearson shape from a 1000-sample run with 900 hits.
    let fast = beta_quantile(p(5e-5), 900.0, 101.0).unwrap().value();
    let slow = reference::beta_quantile(5e-5, 900.0, 101.0);
    assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cdf_is_monotone(a in -9.0..9.0f64, gap in 0.0..3.0f64) {
        let lo = gaussian_cdf(a).unwrap().value();
        let hi = gaussian_cdf(a + gap).unwrap().value();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn incomplete_beta_is_monotone_in_x(
        x in 0.0..1.0f64,
        gap in 0.0..0.5f64,
        a in 0.3..50.0f64,
        b in 0.3..50.0f64,
    ) {
        let x2 = (x + gap).min(1.0);
        let lo = regularized_incomplete_beta(x, a, b).unwrap().value();
        let hi = regularized_incomplete_beta(x2, a, b).unwrap().value();
        prop_assert!(hi >= lo - 1e-13);
    }

    #[test]
    fn beta_quantile_is_monotone_in_q(
        q in 0.0..1.0f64,
        gap in 0.0..0.3f64,
        a in 0.3..50.0f64,
        b in 0.3..50.0f64,
    ) {
        let q2 = (q + gap).min(1.0);
        let lo = beta_quantile(p(q), a, b).unwrap().value();
        let hi = beta_quantile(p(q2), a, b).unwrap().value();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn quantile_cdf_duality(
        q in 1e-6..1.0f64,
        a in 0.5..300.0f64,
        b in 0.5..300.0f64,
    ) {
        let q = q.min(1.0 - 1e-6);
        let x = beta_quantile(p(q), a, b).unwrap();
        let back = regularized_incomplete_beta(x.value(), a, b).unwrap().value();
        prop_assert!((back - q).abs() <= 1e-8, "a={a} b={b} q={q} back={back}");
    }

    #[test]
    fn gaussian_round_trip_randomized(q in 1e-9..1.0f64) {
        let q = q.min(1.0 - 1e-9);
        let back = gaussian_cdf(gaussian_quantile(p(q))).unwrap().value();
        prop_assert!((back - q).abs() <= 1e-9);
    }
}
