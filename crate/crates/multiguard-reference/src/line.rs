//! Reference behavior for one-dimensional affine-score classifiers: top-k
//! selection, a dense grid scan standing in for the closed-form line
//! partition, and Monte Carlo label frequencies under Gaussian input noise.
//! Classifiers are passed as raw (slope, bias) pairs so nothing from the main
//! crate leaks in.

use crate::rng::SplitMix64;

/// Indices of the k largest scores, ties broken toward the smaller index.
/// Returned sorted ascending.
pub fn top_k_by_score(scores: &[f64], k: usize) -> Vec<usize> {
    assert!(k <= scores.len());
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        scores[j]
            .partial_cmp(&scores[i])
            .expect("scores must not be NaN")
            .then(i.cmp(&j))
    });
    let mut top: Vec<usize> = order[..k].to_vec();
    top.sort_unstable();
    top
}

fn top_set_at(lines: &[(f64, f64)], k_prime: usize, w: f64) -> Vec<usize> {
    let scores: Vec<f64> = lines.iter().map(|&(a, b)| a * w + b).collect();
    top_k_by_score(&scores, k_prime)
}

/// Dense scan of the top-k' set over [lo, hi] with the given step. Returns
/// the approximate change points and the distinct consecutive sets (one more
/// set than change points).
pub fn scan_partition(
    lines: &[(f64, f64)],
    k_prime: usize,
    lo: f64,
    hi: f64,
    step: f64,
) -> (Vec<f64>, Vec<Vec<usize>>) {
    assert!(step > 0.0 && hi > lo);
    let mut breakpoints = Vec::new();
    let mut sets = Vec::new();
    let mut current = top_set_at(lines, k_prime, lo);
    sets.push(current.clone());
    let steps = ((hi - lo) / step).ceil() as u64;
    for i in 1..=steps {
        let w = lo + i as f64 * step;
        let set = top_set_at(lines, k_prime, w);
        if set != current {
            breakpoints.push(w - 0.5 * step);
            sets.push(set.clone());
            current = set;
        }
    }
    (breakpoints, sets)
}

/// Monte Carlo estimate of the per-label probability of appearing in the
/// top-k' set when the input is `center` plus N(0, sigma^2) noise.
pub fn mc_label_frequencies(
    lines: &[(f64, f64)],
    k_prime: usize,
    center: f64,
    sigma: f64,
    n: u64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut hits = vec![0u64; lines.len()];
    for _ in 0..n {
        let w = center + sigma * rng.next_normal();
        for label in top_set_at(lines, k_prime, w) {
            hits[label] += 1;
        }
    }
    hits.into_iter().map(|h| h as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_k_tie_breaks_by_index() {
        assert_eq!(top_k_by_score(&[1.0, 3.0, 3.0, 0.0], 2), vec![1, 2]);
        assert_eq!(top_k_by_score(&[2.0, 2.0], 1), vec![0]);
    }

    #[test]
    fn scan_finds_the_single_crossing() {
        // s0 = w, s1 = -w: top-1 flips at the origin.
        let (bps, sets) = scan_partition(&[(1.0, 0.0), (-1.0, 0.0)], 1, -2.0, 2.0, 1e-3);
        assert_eq!(bps.len(), 1);
        assert!(bps[0].abs() < 1e-2);
        assert_eq!(sets, vec![vec![1], vec![0]]);
    }

    #[test]
    fn mc_matches_symmetry() {
        let p = mc_label_frequencies(&[(1.0, 0.0), (-1.0, 0.0)], 1, 0.0, 1.0, 100_000, 9);
        assert!((p[0] - 0.5).abs() < 0.01);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
    }
}
