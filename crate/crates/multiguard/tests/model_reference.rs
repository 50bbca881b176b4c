//! The closed-form line partition and exact label probabilities against the
//! dense grid scan and Monte Carlo references.

use multiguard::model::{LabelScore, SyntheticClassifier};
use multiguard_reference as reference;
use reference::SplitMix64;

fn line_classifier(lines: &[(f64, f64)], k_prime: usize) -> SyntheticClassifier<f64> {
    let labels = lines
        .iter()
        .map(|&(a, b)| LabelScore {
            weights: vec![a],
            bias: b,
        })
        .collect();
    SyntheticClassifier::new(1, k_prime, labels).unwrap()
}

fn random_lines(rng: &mut SplitMix64, c: usize) -> Vec<(f64, f64)> {
    (0..c)
        .map(|_| {
            (
                4.0 * rng.next_f64() - 2.0,
                4.0 * rng.next_f64() - 2.0,
            )
        })
        .collect()
}

#[test]
fn partition_matches_a_dense_grid_scan() {
    let mut rng = SplitMix64::new(2024);
    for trial in 0..40 {
        let c = 3 + (rng.next_u64() % 4) as usize;
        let k_prime = 1 + (rng.next_u64() % 2) as usize;
        let lines = random_lines(&mut rng, c);
        let clf = line_classifier(&lines, k_prime);
        let partition = clf.partition_line().unwrap();

        let pad = 1.0;
        let lo = partition.breakpoints().first().copied().unwrap_or(0.0) - pad;
        let hi = partition.breakpoints().last().copied().unwrap_or(0.0) + pad;
        let (scan_bps, scan_sets) = reference::scan_partition(&lines, k_prime, lo, hi, 1e-4);

        assert_eq!(
            partition.breakpoints().len(),
            scan_bps.len(),
            "trial {trial}: {:?} vs {:?}",
            partition.breakpoints(),
            scan_bps
        );
        for (b, s) in partition.breakpoints().iter().zip(&scan_bps) {
            assert!((b - s).abs() < 1e-3, "trial {trial}: breakpoint {b} vs {s}");
        }
        assert_eq!(partition.top_sets(), &scan_sets[..], "trial {trial}");
    }
}

#[test]
fn stored_sets_agree_with_prediction_at_random_points() {
    let mut rng = SplitMix64::new(77);
    let lines = random_lines(&mut rng, 5);
    let clf = line_classifier(&lines, 2);
    let partition = clf.partition_line().unwrap();
    for _ in 0..10_000 {
        let w = 8.0 * rng.next_f64() - 4.0;
        assert_eq!(
            partition.top_set_at(w),
            clf.predict_topk(&[w]).unwrap().as_slice(),
            "w = {w}"
        );
    }
}

#[test]
fn exact_probabilities_match_monte_carlo() {
    let mut rng = SplitMix64::new(5150);
    for trial in 0..8 {
        let c = 3 + (rng.next_u64() % 3) as usize;
        let k_prime = 1 + (rng.next_u64() % 2) as usize;
        let lines = random_lines(&mut rng, c);
        let clf = line_classifier(&lines, k_prime);
        let center = 0.3;
        let sigma = 0.5;
        let exact = clf.exact_label_probabilities(center, sigma).unwrap();
        let n = 1_000_000u64;
        let mc = reference::mc_label_frequencies(&lines, k_prime, center, sigma, n, 1000 + trial);
        for (label, (e, m)) in exact.iter().zip(&mc).enumerate() {
            let p = e.value();
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-6);
            assert!(
                (p - m).abs() <= 3.0 * se + 1e-4,
                "trial {trial} label {label}: exact {p}, mc {m}, se {se}"
            );
        }
    }
}

#[test]
fn probabilities_sum_to_k_prime_on_random_classifiers() {
    let mut rng = SplitMix64::new(31337);
    for _ in 0..200 {
        let c = 2 + (rng.next_u64() % 6) as usize;
        let k_prime = 1 + (rng.next_u64() % c as u64) as usize;
        let clf = line_classifier(&random_lines(&mut rng, c), k_prime);
        let center = 3.0 * rng.next_f64() - 1.5;
        let sigma = 0.1 + rng.next_f64();
        let probs = clf.exact_label_probabilities(center, sigma).unwrap();
        let sum: f64 = probs.iter().map(|p| p.value()).sum();
        assert!(
            (sum - k_prime as f64).abs() < 1e-10,
            "c={c} k'={k_prime}: sum={sum}"
        );
    }
}
