//! Straight-line evaluation of the certified-intersection-size condition,
//! written directly from the closed-form inequality with no search tricks:
//! every candidate size is checked and the largest satisfying one returned.
//! Uses the reference normal CDF/quantile from this crate.

use crate::gauss::{normal_cdf, normal_quantile};

fn phi_shifted(p: f64, shift: f64) -> f64 {
    // Phi(Phi^{-1}(p) + shift) with the p = 0 / p = 1 saturation conventions.
    normal_cdf(normal_quantile(p.clamp(0.0, 1.0)) + shift)
}

/// Does the condition hold for intersection size `e`? `lower_desc` holds the
/// ground-truth label probability lower bounds sorted descending, and
/// `upper_desc` the remaining labels' upper bounds sorted descending.
pub fn condition_direct(
    lower_desc: &[f64],
    upper_desc: &[f64],
    sigma: f64,
    k_prime: usize,
    k: usize,
    radius: f64,
    use_joint_terms: bool,
) -> bool {
    let d = lower_desc.len();
    assert!(e_range_ok(1, d, k), "empty problem");
    assert!(radius >= 0.0 && sigma > 0.0);
    condition_at(lower_desc, upper_desc, sigma, k_prime, k, radius, use_joint_terms, 1).is_some()
}

fn e_range_ok(e: usize, d: usize, k: usize) -> bool {
    e >= 1 && e <= d.min(k)
}

#[allow(clippy::too_many_arguments)]
fn condition_at(
    lower_desc: &[f64],
    upper_desc: &[f64],
    sigma: f64,
    k_prime: usize,
    k: usize,
    radius: f64,
    use_joint_terms: bool,
    e: usize,
) -> Option<bool> {
    let d = lower_desc.len();
    if !e_range_ok(e, d, k) {
        return None;
    }
    let kp = k_prime as f64;
    let r = radius / sigma;

    let mut lhs = phi_shifted(lower_desc[e - 1], -r);
    if use_joint_terms {
        let mut partial = 0.0;
        for u in 1..=(d - e + 1) {
            partial += lower_desc[e - 1 + u - 1];
            let term = kp / u as f64 * phi_shifted((partial / kp).clamp(0.0, 1.0), -r);
            if term > lhs {
                lhs = term;
            }
        }
    }

    let s = k - e + 1;
    let rhs = if upper_desc.len() < s {
        // Not enough competing labels to fill the complement of the top-k set.
        0.0
    } else {
        let tighten = (kp - lower_desc.iter().sum::<f64>()).max(0.0);
        let mut rhs = phi_shifted(upper_desc[s - 1], r);
        if use_joint_terms {
            let mut partial = 0.0;
            for v in 1..=s {
                partial += upper_desc[s - v];
                let bounded = partial.min(tighten).max(0.0);
                let term = kp / v as f64 * phi_shifted((bounded / kp).clamp(0.0, 1.0), r);
                if term < rhs {
                    rhs = term;
                }
            }
        }
        rhs
    };

    Some(lhs > rhs)
}

/// Largest certified intersection size by exhaustive scan over every
/// candidate, or 0 when no candidate satisfies the condition.
pub fn certified_size_direct(
    lower_desc: &[f64],
    upper_desc: &[f64],
    sigma: f64,
    k_prime: usize,
    k: usize,
    radius: f64,
    use_joint_terms: bool,
) -> usize {
    let d = lower_desc.len();
    let mut best = 0;
    for e in 1..=d.min(k) {
        if condition_at(
            lower_desc,
            upper_desc,
            sigma,
            k_prime,
            k,
            radius,
            use_joint_terms,
            e,
        ) == Some(true)
        {
            best = e;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_bounds_certify_everything() {
        let e = certified_size_direct(&[1.0, 1.0], &[0.0, 0.0, 0.0], 0.5, 1, 3, 10.0, true);
        assert_eq!(e, 2);
    }

    #[test]
    fn vacuous_bounds_certify_nothing() {
        let e = certified_size_direct(&[0.0, 0.0], &[0.5, 0.5], 0.5, 1, 2, 0.0, true);
        assert_eq!(e, 0);
    }

    #[test]
    fn single_label_threshold_matches_closed_form() {
        // k' = k = 1, d = 1: certified iff radius < sigma/2 (qn(pl) - qn(pu)).
        let (pl, pu, sigma) = (0.8, 0.2, 0.5);
        let r_star = sigma / 2.0 * (normal_quantile(pl) - normal_quantile(pu));
        for (radius, expect) in [(r_star - 1e-4, 1), (r_star + 1e-4, 0)] {
            let e = certified_size_direct(&[pl], &[pu], sigma, 1, 1, radius, true);
            assert_eq!(e, expect, "radius {radius}");
        }
    }
}
