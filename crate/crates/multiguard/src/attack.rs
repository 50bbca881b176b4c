//! Empirical soundness check for the 1-D synthetic classifier: the smoothed
//! top-k prediction is exactly computable there, and the l2 ball is an
//! interval, so a dense perturbation sweep (enriched with every partition
//! breakpoint in range) bounds the attacker's best case from below.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{top_k_indices, IntervalPartition, SyntheticClassifier};
use crate::sampler::SmoothingConfig;
use crate::scalar::{cast, Real};

/// Result of an exhaustive perturbation sweep at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSweep<T: Real = f64> {
    pub radius: T,
    pub grid_step: T,
    /// Smallest intersection with the ground truth over the sweep.
    pub worst_intersection: usize,
    /// A perturbation achieving it (smallest such delta on the grid).
    pub worst_delta: T,
}

/// Exact smoothed top-k prediction at a center, from a precomputed partition.
pub fn smoothed_topk_from_partition<T: Real>(
    partition: &IntervalPartition<T>,
    center: T,
    sigma: T,
    k: usize,
) -> Result<Vec<usize>> {
    if k > partition.num_labels() {
        return Err(Error::config(format!(
            "k = {k} exceeds the {} labels",
            partition.num_labels()
        )));
    }
    let probs = partition.label_probabilities(center, sigma)?;
    let values: Vec<T> = probs.iter().map(|p| p.value()).collect();
    Ok(top_k_indices(&values, k))
}

/// Exact smoothed top-k prediction: the k labels with the largest exact
/// label probabilities, ties broken by label index.
pub fn smoothed_topk_exact<T: Real>(
    classifier: &SyntheticClassifier<T>,
    center: T,
    sigma: T,
    k: usize,
) -> Result<Vec<usize>> {
    let partition = classifier.partition_line()?;
    smoothed_topk_from_partition(&partition, center, sigma, k)
}

fn intersection_size(sorted_a: &[usize], sorted_b: &[usize]) -> usize {
    let mut count = 0;
    let mut i = 0;
    let mut j = 0;
    while i < sorted_a.len() && j < sorted_b.len() {
        match sorted_a[i].cmp(&sorted_b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Sweep every perturbation delta in [-R, R] on a grid of the given step
/// (required to be at most R/100 when R > 0), plus both endpoints and every
/// partition breakpoint shifted into range, and report the smallest
/// intersection between the ground truth and the exact smoothed top-k set.
pub fn exhaustive_attack<T: Real>(
    classifier: &SyntheticClassifier<T>,
    x: T,
    ground_truth: &[usize],
    config: &SmoothingConfig<T>,
    radius: T,
    grid_step: T,
) -> Result<AttackSweep<T>> {
    config.validate()?;
    if radius.is_nan() || radius < T::zero() || !radius.is_finite() {
        return Err(Error::domain(format!(
            "radius must be finite and nonnegative, got {radius}"
        )));
    }
    if !(grid_step > T::zero()) {
        return Err(Error::config(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    if radius > T::zero() && grid_step > radius / cast(100.0) {
        return Err(Error::config(format!(
            "grid step {grid_step} too coarse for radius {radius} (need <= R/100)"
        )));
    }
    let mut gt = ground_truth.to_vec();
    gt.sort_unstable();
    gt.dedup();
    if gt.is_empty() || *gt.last().expect("nonempty") >= classifier.num_labels() {
        return Err(Error::config("ground truth empty or out of range"));
    }

    let partition = classifier.partition_line()?;
    let mut deltas: Vec<T> = Vec::new();
    if radius == T::zero() {
        deltas.push(T::zero());
    } else {
        let mut i: u64 = 0;
        loop {
            let delta = -radius + cast::<T>(i as f64) * grid_step;
            if delta >= radius {
                break;
            }
            deltas.push(delta);
            i += 1;
        }
        deltas.push(radius);
        for &b in partition.breakpoints() {
            let delta = b - x;
            if delta.abs() <= radius {
                deltas.push(delta);
            }
        }
        deltas.sort_by(|p, q| p.partial_cmp(q).expect("finite deltas"));
    }

    let evaluated: Vec<usize> = deltas
        .par_iter()
        .map(|&delta| {
            let top = smoothed_topk_from_partition(&partition, x + delta, config.sigma, config.k)
                .expect("k validated against the classifier");
            intersection_size(&gt, &top)
        })
        .collect();
    let (mut worst, mut worst_delta) = (usize::MAX, T::zero());
    for (&delta, &count) in deltas.iter().zip(&evaluated) {
        if count < worst {
            worst = count;
            worst_delta = delta;
        }
    }
    Ok(AttackSweep {
        radius,
        grid_step,
        worst_intersection: worst.min(gt.len()).min(config.k),
        worst_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LabelScore;

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

    fn config(k_prime: usize, k: usize) -> SmoothingConfig<f64> {
        SmoothingConfig {
            sigma: 0.5,
            n: 1,
            alpha: 0.5,
            k_prime,
            k,
            seed: 0,
        }
    }

    #[test]
    fn both_labels_always_predicted() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 2);
        let top = smoothed_topk_exact(&clf, 3.0, 0.5, 2).unwrap();
        assert_eq!(top, vec![0, 1]);
    }

    #[test]
    fn symmetric_tie_breaks_toward_the_smaller_label() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 1);
        // At the symmetry point both probabilities are exactly 0.5.
        let top = smoothed_topk_exact(&clf, 0.0, 1.0, 1).unwrap();
        assert_eq!(top, vec![0]);
    }

    #[test]
    fn zero_radius_sweep_is_the_unperturbed_prediction() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.3)], 1);
        let cfg = config(1, 1);
        let sweep = exhaustive_attack(&clf, 0.8, &[0], &cfg, 0.0, 0.01).unwrap();
        let top = smoothed_topk_exact(&clf, 0.8, 0.5, 1).unwrap();
        assert_eq!(sweep.worst_intersection, usize::from(top[0] == 0));
        assert_eq!(sweep.worst_delta, 0.0);
    }

    #[test]
    fn worst_intersection_is_nonincreasing_in_radius() {
        let clf = line_classifier(&[(1.2, -0.3), (-0.8, 0.1), (0.3, 0.4)], 1);
        let cfg = config(1, 2);
        let mut previous = usize::MAX;
        for radius in [0.0, 0.2, 0.5, 1.0, 1.5] {
            let step = if radius > 0.0 { radius / 200.0 } else { 0.01 };
            let sweep = exhaustive_attack(&clf, 0.1, &[0, 1], &cfg, radius, step).unwrap();
            assert!(sweep.worst_intersection <= previous);
            assert!(sweep.worst_delta.abs() <= radius);
            previous = sweep.worst_intersection;
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 1);
        let cfg = config(1, 1);
        assert!(exhaustive_attack(&clf, 0.0, &[0], &cfg, 1.0, 0.5).is_err());
    }
}
