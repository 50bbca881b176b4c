//! Certified top-k precision/recall/f1 at each radius, aggregated over a
//! dataset, and the grid sweep that produces curve data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::bounds::estimate_bounds;
use crate::certifier::{baseline_per_label, certified_intersection_size, Mode};
use crate::error::{Error, Result};
use crate::sampler::{CertificationInstance, SmoothingConfig};
use crate::scalar::{cast, cast_usize, Real};

/// One certified size together with what is needed to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord<T: Real = f64> {
    pub instance_id: String,
    pub mode: Mode,
    pub radius: T,
    pub certified_size: usize,
    /// Number of ground-truth labels of the instance.
    pub d: usize,
    /// Number of labels the smoothed classifier predicts.
    pub k: usize,
}

/// Averaged metrics for one (mode, radius) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow<T: Real = f64> {
    pub mode: Mode,
    pub radius: T,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub num_instances: usize,
}

/// Per-instance certified metrics: (e/k, e/d, 2e/(d+k)).
pub fn instance_metrics<T: Real>(e: usize, d: usize, k: usize) -> Result<(T, T, T)> {
    if d == 0 || k == 0 {
        return Err(Error::config("d and k must be positive"));
    }
    if e > d.min(k) {
        return Err(Error::config(format!(
            "certified size {e} exceeds min(d, k) = {}",
            d.min(k)
        )));
    }
    let e = cast_usize::<T>(e);
    let precision = e / cast_usize(k);
    let recall = e / cast_usize(d);
    let f1 = cast::<T>(2.0) * e / cast_usize(d + k);
    Ok((precision, recall, f1))
}

/// Group records by (mode, radius) and average the per-instance metrics.
/// Rows come back sorted by (mode, radius). An empty input is an error, not
/// an empty table.
pub fn aggregate<T: Real>(records: &[ResultRecord<T>]) -> Result<Vec<MetricsRow<T>>> {
    if records.is_empty() {
        return Err(Error::config("no result records to aggregate"));
    }
    let mut sorted: Vec<&ResultRecord<T>> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.mode
            .cmp(&b.mode)
            .then(a.radius.partial_cmp(&b.radius).expect("finite radii"))
            .then(a.instance_id.cmp(&b.instance_id))
    });
    let mut rows: Vec<MetricsRow<T>> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let (mode, radius) = (sorted[i].mode, sorted[i].radius);
        let mut sums = (T::zero(), T::zero(), T::zero());
        let mut count = 0usize;
        while i < sorted.len() && sorted[i].mode == mode && sorted[i].radius == radius {
            let rec = sorted[i];
            let (p, r, f) = instance_metrics(rec.certified_size, rec.d, rec.k)?;
            sums = (sums.0 + p, sums.1 + r, sums.2 + f);
            count += 1;
            i += 1;
        }
        let denom = cast_usize::<T>(count);
        rows.push(MetricsRow {
            mode,
            radius,
            precision: sums.0 / denom,
            recall: sums.1 / denom,
            f1: sums.2 / denom,
            num_instances: count,
        });
    }
    Ok(rows)
}

/// Certify every instance at every grid radius in every requested mode and
/// average. The grid must be sorted ascending. Instances are processed in
/// parallel; aggregation order is fixed, so the output is deterministic.
pub fn sweep<T: Real>(
    instances: &[CertificationInstance],
    config: &SmoothingConfig<T>,
    r_grid: &[T],
    modes: &[Mode],
    strict_cp: bool,
) -> Result<Vec<MetricsRow<T>>> {
    config.validate()?;
    if instances.is_empty() {
        return Err(Error::config("no instances to sweep"));
    }
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::config("radius grid must be nonempty and ascending"));
    }
    let records = certify_all(instances, config, r_grid, modes, strict_cp)?;
    aggregate(&records)
}

/// The flat per-(instance, mode, radius) table behind `sweep`, in
/// deterministic order (instance, then mode, then radius).
pub fn certify_all<T: Real>(
    instances: &[CertificationInstance],
    config: &SmoothingConfig<T>,
    r_grid: &[T],
    modes: &[Mode],
    strict_cp: bool,
) -> Result<Vec<ResultRecord<T>>> {
    let per_instance: Vec<Result<Vec<ResultRecord<T>>>> = instances
        .par_iter()
        .map(|instance| {
            let mut cfg = *config;
            cfg.k_prime = instance.k_prime;
            if cfg.k > instance.c {
                return Err(Error::config(format!(
                    "instance {:?}: k = {} exceeds c = {}",
                    instance.id, cfg.k, instance.c
                )));
            }
            let bounds = estimate_bounds(instance, cfg.alpha, strict_cp)?;
            let mut records = Vec::with_capacity(modes.len() * r_grid.len());
            for &mode in modes {
                for &radius in r_grid {
                    let e = match mode {
                        Mode::MultiGuard | Mode::MultiGuardNoJoint => {
                            certified_intersection_size(
                                &bounds,
                                &instance.id,
                                radius,
                                &cfg,
                                mode.uses_joint_terms(),
                            )?
                            .certified_size
                        }
                        Mode::BaselinePerLabel => {
                            baseline_per_label(instance, radius, &cfg, strict_cp)?.certified_size
                        }
                    };
                    records.push(ResultRecord {
                        instance_id: instance.id.clone(),
                        mode,
                        radius,
                        certified_size: e,
                        d: instance.d(),
                        k: cfg.k,
                    });
                }
            }
            Ok(records)
        })
        .collect();
    let mut records = Vec::new();
    for batch in per_instance {
        records.extend(batch?);
    }
    Ok(records)
}

/// Ascending radius grid start, start+step, ..., up to stop (inclusive
/// within half a step of float slack).
pub fn r_grid<T: Real>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if start.is_nan() || stop.is_nan() || step.is_nan() || start < T::zero() {
        return Err(Error::config("grid bounds must be nonnegative numbers"));
    }
    if !(step > T::zero()) || stop < start {
        return Err(Error::config("need step > 0 and stop >= start"));
    }
    let mut grid = Vec::new();
    let slack = step * cast::<T>(1e-9);
    let mut i: u64 = 0;
    loop {
        let r = start + cast::<T>(i as f64) * step;
        if r > stop + slack {
            break;
        }
        grid.push(r);
        i += 1;
    }
    Ok(grid)
}

/// First line of every metrics file.
pub const METRICS_FILE_HEADER: &str = "# multiguard-metrics v1";
/// The fixed column header.
pub const METRICS_COLUMNS: &str = "mode,R,precision,recall,f1,n";

/// Write the metrics table as comma-separated UTF-8 with the schema header,
/// any extra comment lines, and the fixed column row.
pub fn write_metrics_csv<T: Real>(
    path: &Path,
    rows: &[MetricsRow<T>],
    comments: &[String],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{METRICS_FILE_HEADER}")?;
    for comment in comments {
        writeln!(out, "# {comment}")?;
    }
    writeln!(out, "{METRICS_COLUMNS}")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{}",
            row.mode, row.radius, row.precision, row.recall, row.f1, row.num_instances
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_perfect_certificates() {
        let (p, r, f) = instance_metrics::<f64>(0, 3, 2).unwrap();
        assert_eq!((p, r, f), (0.0, 0.0, 0.0));
        let (p, r, f) = instance_metrics::<f64>(2, 2, 2).unwrap();
        assert_eq!((p, r, f), (1.0, 1.0, 1.0));
    }

    #[test]
    fn fractional_metrics() {
        let (p, r, f) = instance_metrics::<f64>(2, 4, 3).unwrap();
        assert!((p - 0.6667).abs() < 1e-4);
        assert!((r - 0.5).abs() < 1e-12);
        assert!((f - 0.5714).abs() < 1e-4);
    }

    #[test]
    fn oversized_certificate_is_an_error() {
        assert!(instance_metrics::<f64>(3, 2, 5).is_err());
        assert!(instance_metrics::<f64>(1, 0, 5).is_err());
    }

    #[test]
    fn grid_is_inclusive_of_the_stop() {
        let g = r_grid::<f64>(0.0, 2.0, 0.05).unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], 0.0);
        assert!((g[40] - 2.0).abs() < 1e-12);
        assert!(r_grid::<f64>(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn aggregate_groups_and_sorts() {
        let rec = |mode, radius, e| ResultRecord::<f64> {
            instance_id: "i".into(),
            mode,
            radius,
            certified_size: e,
            d: 2,
            k: 2,
        };
        let rows = aggregate(&[
            rec(Mode::MultiGuardNoJoint, 0.0, 1),
            rec(Mode::MultiGuard, 0.5, 1),
            rec(Mode::MultiGuard, 0.0, 2),
            rec(Mode::MultiGuard, 0.0, 0),
        ])
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].mode, Mode::MultiGuard);
        assert_eq!(rows[0].radius, 0.0);
        assert_eq!(rows[0].num_instances, 2);
        assert!((rows[0].precision - 0.5).abs() < 1e-12);
        assert_eq!(rows[2].mode, Mode::MultiGuardNoJoint);
    }

    #[test]
    fn empty_aggregation_is_an_error() {
        assert!(aggregate::<f64>(&[]).is_err());
    }
}
