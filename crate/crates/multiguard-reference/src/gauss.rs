//! Standard-normal CDF and quantile built from an error-function Maclaurin
//! series plus a tail continued fraction, with the quantile recovered by
//! bisection. Accuracy is nominally below 1e-14 absolute; everything here is
//! O(slow) and intended for tests only.

const FRAC_1_SQRT_PI: f64 = 0.5641895835477563;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// erf by Maclaurin series: erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1)).
///
/// Only reliable for |x| <= ~3 before cancellation eats digits; `erf` switches
/// to the continued fraction beyond that.
fn erf_series(x: f64) -> f64 {
    let mut term = x; // x^(2n+1) / n!
    let mut sum = x;
    let x2 = x * x;
    for n in 1..400 {
        term *= -x2 / n as f64;
        let contrib = term / (2.0 * n as f64 + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * sum
}

/// erfc via the Laplace continued fraction
/// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// evaluated bottom-up with a fixed depth. Valid for x >= 2.
fn erfc_cf(x: f64) -> f64 {
    debug_assert!(x >= 2.0);
    let mut tail = x;
    for m in (1..=300).rev() {
        tail = x + (m as f64 / 2.0) / tail;
    }
    (-x * x).exp() * FRAC_1_SQRT_PI / tail
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() <= 2.5 {
        erf_series(x)
    } else if x > 0.0 {
        1.0 - erfc_cf(x)
    } else {
        erfc_cf(-x) - 1.0
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 2.5 {
        erfc_cf(x)
    } else if x <= -2.5 {
        2.0 - erfc_cf(-x)
    } else {
        1.0 - erf_series(x)
    }
}

/// Standard-normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    // 0.5 * erfc(-z / sqrt(2)); for large |z| the erfc branch keeps the tail
    // accurate instead of cancelling against 1.
    0.5 * erfc(-z / SQRT_2)
}

/// Standard-normal quantile by plain bisection on `normal_cdf`.
///
/// Returns the infinities at p = 0 and p = 1. Panics on p outside [0, 1].
pub fn normal_quantile(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p out of range: {p}");
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_cf_agree_at_the_seam() {
        for &x in &[2.0, 2.2, 2.4, 2.4999] {
            let a = 1.0 - erf_series(x);
            let b = erfc_cf(x);
            assert!((a - b).abs() < 1e-14, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn known_values() {
        assert!((erf(0.0)).abs() < 1e-16);
        // erf(1) = 0.84270079294971486934...
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-14);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        // Phi(1.96) = 0.97500210485177963...
        assert!((normal_cdf(1.96) - 0.9750021048517796).abs() < 1e-13);
        // Phi(-6) = 9.865876450376946e-10
        let tail = normal_cdf(-6.0);
        assert!((tail - 9.865876450376946e-10).abs() < 1e-19 * 1e10);
    }

    #[test]
    fn quantile_round_trip() {
        for &p in &[1e-10, 1e-4, 0.025, 0.5, 0.8, 0.999, 1.0 - 1e-9] {
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() < 1e-12, "p={p}");
        }
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
    }
}
