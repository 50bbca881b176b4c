//! Regularized incomplete beta by adaptive Simpson quadrature of the scaled
//! density, and the Beta quantile by bisection on it. Restricted to shape
//! parameters a, b >= 1 so the integrand has no endpoint singularities; that
//! covers every use in this workspace (Clopper-Pearson shapes are counts
//! plus one).

/// Log of the unnormalized Beta density t^(a-1) (1-t)^(b-1), with the 0*log(0)
/// cases pinned so a = 1 or b = 1 behave at the endpoints.
fn log_density(t: f64, a: f64, b: f64) -> f64 {
    let la = if a == 1.0 { 0.0 } else { (a - 1.0) * t.ln() };
    let lb = if b == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - t).ln() };
    la + lb
}

/// Adaptive Simpson on [x0, x1] with absolute tolerance `eps`.
fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, x0: f64, x1: f64, eps: f64) -> f64 {
    fn simpson_step(f0: f64, f1: f64, f2: f64, h: f64) -> f64 {
        h / 6.0 * (f0 + 4.0 * f1 + f2)
    }
    fn recurse<F: Fn(f64) -> f64 + Copy>(
        f: F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson_step(fa, flm, fm, m - a);
        let right = simpson_step(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1)
    }
    if x1 <= x0 {
        return 0.0;
    }
    let m = 0.5 * (x0 + x1);
    let fa = f(x0);
    let fm = f(m);
    let fb = f(x1);
    let whole = simpson_step(fa, fm, fb, x1 - x0);
    recurse(f, x0, x1, fa, fm, fb, whole, eps, 60)
}

/// Piecewise adaptive Simpson over [x0, x1], split at the supplied knots so a
/// narrow interior peak cannot hide between the initial sample points.
fn simpson_with_knots<F: Fn(f64) -> f64 + Copy>(
    f: F,
    x0: f64,
    x1: f64,
    knots: &[f64],
    eps: f64,
) -> f64 {
    let mut cuts = vec![x0];
    for &t in knots {
        if t > x0 && t < x1 {
            cuts.push(t);
        }
    }
    cuts.push(x1);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.windows(2).map(|w| simpson(f, w[0], w[1], eps)).sum()
}

/// Regularized incomplete beta I_x(a, b) as a ratio of two quadratures of the
/// peak-scaled density; the normalizing constant cancels, so no gamma
/// function is involved anywhere.
///
/// Panics on a < 1, b < 1, or x outside [0, 1].
pub fn beta_cdf(x: f64, a: f64, b: f64) -> f64 {
    assert!(a >= 1.0 && b >= 1.0, "reference beta_cdf needs a, b >= 1");
    assert!((0.0..=1.0).contains(&x), "x out of range: {x}");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // Scale by the density maximum so the integrand peaks at 1 even when the
    // raw density over- or underflows (a, b in the hundreds of thousands).
    let peak = if a + b > 2.0 {
        ((a - 1.0) / (a + b - 2.0)).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let log_peak = log_density(peak, a, b);
    let g = move |t: f64| (log_density(t, a, b) - log_peak).exp();
    // Force sample points around the mode: the density of Beta(a, b) has
    // standard deviation ~sqrt(ab/(a+b)^2/(a+b+1)), which for large shapes is
    // far narrower than the unit interval.
    let sd = (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt();
    let knots: Vec<f64> = [-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0]
        .iter()
        .map(|m| (peak + m * sd).clamp(0.0, 1.0))
        .collect();
    let total = simpson_with_knots(g, 0.0, 1.0, &knots, 1e-13);
    let part = simpson_with_knots(g, 0.0, x, &knots, 1e-13);
    (part / total).clamp(0.0, 1.0)
}

/// Beta quantile by bisection on `beta_cdf`. Same parameter restrictions.
pub fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "q out of range: {q}");
    if q == 0.0 {
        return 0.0;
    }
    if q == 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_cdf(mid, a, b) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_case() {
        assert!((beta_cdf(0.3, 1.0, 1.0) - 0.3).abs() < 1e-12);
        assert!((beta_quantile(0.5, 1.0, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_case() {
        // I_x(a, b) = 1 - I_{1-x}(b, a)
        let v = beta_cdf(0.2, 3.0, 8.0);
        let w = beta_cdf(0.8, 8.0, 3.0);
        assert!((v - (1.0 - w)).abs() < 1e-11);
        // Median of Beta(2, 2) is exactly 0.5.
        assert!((beta_quantile(0.5, 2.0, 2.0) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn closed_form_small_integer_shapes() {
        // I_x(2, 1) = x^2; I_x(1, b) = 1 - (1-x)^b.
        assert!((beta_cdf(0.7, 2.0, 1.0) - 0.49).abs() < 1e-12);
        assert!((beta_cdf(0.25, 1.0, 4.0) - (1.0 - 0.75_f64.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_large_shapes() {
        // Beta(900, 101): mean ~0.8999, sd ~0.0095. CDF at the mean is near 0.5.
        let c = beta_cdf(900.0 / 1001.0, 900.0, 101.0);
        assert!((0.4..0.6).contains(&c), "cdf at mean = {c}");
        let q = beta_quantile(5e-5, 900.0, 101.0);
        assert!((beta_cdf(q, 900.0, 101.0) - 5e-5).abs() < 1e-11);
    }
}
