//! Label-probability bounds: Clopper-Pearson endpoints at level alpha/c
//! (Bonferroni-corrected so all c bounds hold simultaneously with
//! confidence 1 - alpha), and the joint partial sums the certifier consumes.

use crate::error::{Error, Result};
use crate::numerics::{beta_quantile, Probability};
use crate::sampler::CertificationInstance;
use crate::scalar::{cast_usize, Real};

/// Simultaneous label-probability bounds: lower bounds for ground-truth
/// labels, upper bounds for all other labels, each kept sorted descending by
/// value with ties broken by ascending label index.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityBounds<T: Real> {
    /// (label, lower bound), descending by bound.
    lower_sorted: Vec<(usize, T)>,
    /// (label, upper bound), descending by bound.
    upper_sorted: Vec<(usize, T)>,
    /// Sum of all lower bounds, for the joint-upper tightening.
    sum_lower: T,
}

fn sort_descending<T: Real>(pairs: &mut [(usize, T)]) {
    pairs.sort_by(|(la, va), (lb, vb)| {
        vb.partial_cmp(va)
            .expect("bounds are not NaN")
            .then(la.cmp(lb))
    });
}

impl<T: Real> ProbabilityBounds<T> {
    /// Build from explicit (label, bound) pairs. Lower pairs are the
    /// ground-truth labels, upper pairs everything else; label sets must be
    /// disjoint and the lower side nonempty.
    pub fn from_parts(
        mut lower: Vec<(usize, T)>,
        mut upper: Vec<(usize, T)>,
    ) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::config("at least one ground-truth lower bound is required"));
        }
        for &(label, v) in lower.iter().chain(upper.iter()) {
            if v.is_nan() || v < T::zero() || v > T::one() {
                return Err(Error::domain(format!(
                    "bound for label {label} out of [0,1]: {v}"
                )));
            }
        }
        let mut labels: Vec<usize> = lower
            .iter()
            .map(|&(l, _)| l)
            .chain(upper.iter().map(|&(l, _)| l))
            .collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("lower and upper label sets must be disjoint"));
        }
        sort_descending(&mut lower);
        sort_descending(&mut upper);
        let sum_lower = lower
            .iter()
            .fold(T::zero(), |acc, &(_, v)| acc + v);
        Ok(Self {
            lower_sorted: lower,
            upper_sorted: upper,
            sum_lower,
        })
    }

    /// Zero-statistical-slack bounds: use exact label probabilities directly
    /// as both the lower bounds (ground truth) and upper bounds (the rest).
    pub fn from_label_probabilities(
        probabilities: &[Probability<T>],
        ground_truth: &[usize],
    ) -> Result<Self> {
        if ground_truth.iter().any(|&l| l >= probabilities.len()) {
            return Err(Error::config("ground-truth label out of range"));
        }
        let is_gt = |l: usize| ground_truth.contains(&l);
        let lower = ground_truth
            .iter()
            .map(|&l| (l, probabilities[l].value()))
            .collect();
        let upper = (0..probabilities.len())
            .filter(|&l| !is_gt(l))
            .map(|l| (l, probabilities[l].value()))
            .collect();
        Self::from_parts(lower, upper)
    }

    /// Number of ground-truth labels d.
    pub fn d(&self) -> usize {
        self.lower_sorted.len()
    }

    /// Number of non-ground-truth labels (c - d).
    pub fn num_upper(&self) -> usize {
        self.upper_sorted.len()
    }

    /// The rank-th largest lower bound (1-based).
    pub fn lower_at(&self, rank: usize) -> T {
        self.lower_sorted[rank - 1].1
    }

    /// The rank-th largest upper bound (1-based).
    pub fn upper_at(&self, rank: usize) -> T {
        self.upper_sorted[rank - 1].1
    }

    pub fn lower_sorted(&self) -> &[(usize, T)] {
        &self.lower_sorted
    }

    pub fn upper_sorted(&self) -> &[(usize, T)] {
        &self.upper_sorted
    }

    pub fn sum_lower(&self) -> T {
        self.sum_lower
    }

    pub fn lower_values(&self) -> Vec<T> {
        self.lower_sorted.iter().map(|&(_, v)| v).collect()
    }

    pub fn upper_values(&self) -> Vec<T> {
        self.upper_sorted.iter().map(|&(_, v)| v).collect()
    }
}

/// Clopper-Pearson lower endpoint for `count` successes out of `n` at level
/// `level`: the level-quantile of Beta(count, n - count + 1), or 0 when
/// count = 0 (the shape parameter would vanish; the bound is vacuous).
pub fn clopper_pearson_lower<T: Real>(count: u64, n: u64, level: T) -> Result<T> {
    check_count(count, n, level)?;
    if count == 0 {
        return Ok(T::zero());
    }
    let a = cast_usize::<T>(count as usize);
    let b = cast_usize::<T>((n - count) as usize) + T::one();
    Ok(beta_quantile(Probability::new(level)?, a, b)?.value())
}

/// Clopper-Pearson upper endpoint for `count` successes out of `n` at level
/// `level`, i.e. the (1-level)-quantile of Beta(count + 1, n - count), or 1
/// when count = n.
///
/// With `strict_cp` set, uses the alternative parameterization
/// Beta(count, n - count + 1) instead (the `--strict-paper-cp` CLI mode,
/// kept for comparison); there count = 0 maps to 0 by continuity.
pub fn clopper_pearson_upper<T: Real>(
    count: u64,
    n: u64,
    level: T,
    strict_cp: bool,
) -> Result<T> {
    check_count(count, n, level)?;
    let q = Probability::new(T::one() - level)?;
    if strict_cp {
        if count == 0 {
            return Ok(T::zero());
        }
        let a = cast_usize::<T>(count as usize);
        let b = cast_usize::<T>((n - count) as usize) + T::one();
        return Ok(beta_quantile(q, a, b)?.value());
    }
    if count == n {
        return Ok(T::one());
    }
    let a = cast_usize::<T>(count as usize) + T::one();
    let b = cast_usize::<T>((n - count) as usize);
    Ok(beta_quantile(q, a, b)?.value())
}

fn check_count<T: Real>(count: u64, n: u64, level: T) -> Result<()> {
    if n == 0 {
        return Err(Error::config("n must be positive"));
    }
    if count > n {
        return Err(Error::config(format!("count {count} exceeds n = {n}")));
    }
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::domain(format!("level must be in (0,1), got {level}")));
    }
    Ok(())
}

/// Estimate simultaneous bounds for one instance: lower endpoints at level
/// alpha/c for ground-truth labels, upper endpoints at the same level for
/// the rest. The c individual bounds hold jointly with confidence 1 - alpha.
pub fn estimate_bounds<T: Real>(
    instance: &CertificationInstance,
    alpha: T,
    strict_cp: bool,
) -> Result<ProbabilityBounds<T>> {
    instance.validate()?;
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    let level = alpha / cast_usize::<T>(instance.c);
    let mut lower = Vec::with_capacity(instance.d());
    let mut upper = Vec::with_capacity(instance.c - instance.d());
    for label in 0..instance.c {
        let count = instance.counts[label];
        if instance.is_ground_truth(label) {
            lower.push((label, clopper_pearson_lower(count, instance.n, level)?));
        } else {
            upper.push((
                label,
                clopper_pearson_upper(count, instance.n, level, strict_cp)?,
            ));
        }
    }
    ProbabilityBounds::from_parts(lower, upper)
}

/// Joint lower sum over ranks e'..e'+u-1 of the descending lower bounds.
pub fn joint_lower_sum<T: Real>(
    bounds: &ProbabilityBounds<T>,
    e_prime: usize,
    u: usize,
) -> Result<T> {
    let d = bounds.d();
    if e_prime < 1 || e_prime > d {
        return Err(Error::IndexRange(format!("e' = {e_prime} not in 1..={d}")));
    }
    if u < 1 || u > d - e_prime + 1 {
        return Err(Error::IndexRange(format!(
            "u = {u} not in 1..={} for e' = {e_prime}",
            d - e_prime + 1
        )));
    }
    Ok(bounds.lower_sorted[(e_prime - 1)..(e_prime - 1 + u)]
        .iter()
        .fold(T::zero(), |acc, &(_, v)| acc + v))
}

/// Joint upper sum over ranks s-v+1..s (s = k - e' + 1) of the descending
/// upper bounds, tightened by the mass constraint: the result is
/// min(partial sum, k' - sum of all lower bounds), floored at 0.
pub fn joint_upper_sum<T: Real>(
    bounds: &ProbabilityBounds<T>,
    e_prime: usize,
    v: usize,
    k: usize,
    k_prime: usize,
) -> Result<T> {
    if e_prime < 1 || e_prime > k {
        return Err(Error::IndexRange(format!("e' = {e_prime} not in 1..={k}")));
    }
    let s = k - e_prime + 1;
    if s > bounds.num_upper() {
        return Err(Error::IndexRange(format!(
            "s = {s} exceeds the {} non-ground-truth labels",
            bounds.num_upper()
        )));
    }
    if v < 1 || v > s {
        return Err(Error::IndexRange(format!("v = {v} not in 1..={s}")));
    }
    let partial = bounds.upper_sorted[(s - v)..s]
        .iter()
        .fold(T::zero(), |acc, &(_, val)| acc + val);
    let tighten = cast_usize::<T>(k_prime) - bounds.sum_lower;
    Ok(partial.min(tighten).max(T::zero()))
}
