//! Monte Carlo sampling front end: draw Gaussian-noised copies of an input,
//! count per-label top-k' frequencies, and read/write counts files.
//!
//! Randomness is counter-based: the noise for sample `t` of instance `id`
//! under seed `s` is a pure function of `(s, id, t)` (a SHA-256-derived
//! ChaCha8 stream), so a run is bit-identical however the samples are
//! scheduled across threads.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::SyntheticClassifier;
use crate::scalar::{cast, Real};

/// Everything the smoothing and certification pipeline is parameterized by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct SmoothingConfig<T: Real = f64> {
    /// Noise standard deviation.
    pub sigma: T,
    /// Number of noisy samples per input.
    pub n: u64,
    /// One minus the overall confidence of the certificate.
    pub alpha: T,
    /// Labels predicted by the base classifier.
    pub k_prime: usize,
    /// Labels predicted by the smoothed classifier.
    pub k: usize,
    /// Root seed for the counter-based noise streams.
    pub seed: u64,
}

impl<T: Real> SmoothingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::config(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.n == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::config(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.k_prime == 0 {
            return Err(Error::config("k_prime must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        Ok(())
    }
}

/// One input's label-frequency counts plus its ground-truth label set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationInstance {
    pub id: String,
    /// Total number of labels.
    pub c: usize,
    /// Labels predicted per noisy sample by the base classifier.
    pub k_prime: usize,
    /// Number of noisy samples.
    pub n: u64,
    /// Ground-truth labels, sorted ascending, distinct, nonempty.
    pub ground_truth: Vec<usize>,
    /// counts[i] = number of samples whose predicted set contained label i.
    pub counts: Vec<u64>,
}

impl CertificationInstance {
    pub fn new(
        id: String,
        c: usize,
        k_prime: usize,
        n: u64,
        ground_truth: Vec<usize>,
        counts: Vec<u64>,
    ) -> Result<Self> {
        let instance = Self {
            id,
            c,
            k_prime,
            n,
            ground_truth,
            counts,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// Number of ground-truth labels d.
    pub fn d(&self) -> usize {
        self.ground_truth.len()
    }

    pub fn is_ground_truth(&self, label: usize) -> bool {
        self.ground_truth.binary_search(&label).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains(['\n', ',']) {
            return Err(Error::config(format!(
                "instance id {:?} must be nonempty without newlines or commas",
                self.id
            )));
        }
        if self.c == 0 {
            return Err(Error::config("c must be positive"));
        }
        if self.k_prime == 0 || self.k_prime > self.c {
            return Err(Error::config(format!(
                "instance {:?}: k_prime must be in 1..={}, got {}",
                self.id, self.c, self.k_prime
            )));
        }
        if self.n == 0 {
            return Err(Error::config(format!("instance {:?}: n must be positive", self.id)));
        }
        if self.counts.len() != self.c {
            return Err(Error::config(format!(
                "instance {:?}: {} counts for c = {}",
                self.id,
                self.counts.len(),
                self.c
            )));
        }
        if let Some(bad) = self.counts.iter().find(|&&x| x > self.n) {
            return Err(Error::config(format!(
                "instance {:?}: count {bad} exceeds n = {}",
                self.id, self.n
            )));
        }
        let total: u64 = self.counts.iter().sum();
        let expected = self.n * self.k_prime as u64;
        if total != expected {
            return Err(Error::config(format!(
                "instance {:?}: counts sum to {total}, expected n*k' = {expected}",
                self.id
            )));
        }
        if self.ground_truth.is_empty() {
            return Err(Error::config(format!(
                "instance {:?}: ground truth must be nonempty",
                self.id
            )));
        }
        if !self.ground_truth.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config(format!(
                "instance {:?}: ground truth must be sorted and distinct",
                self.id
            )));
        }
        if *self.ground_truth.last().expect("nonempty") >= self.c {
            return Err(Error::config(format!(
                "instance {:?}: ground-truth label out of range",
                self.id
            )));
        }
        Ok(())
    }
}

/// 32-byte stream key for one (seed, instance, sample) triple.
fn sample_key(seed: u64, instance_id: &str, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((instance_id.len() as u64).to_le_bytes());
    hasher.update(instance_id.as_bytes());
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

/// Standard normal draws via Box-Muller on the keyed stream. The arithmetic
/// stays in f64 and converts at the end, so every scalar type sees the same
/// underlying noise.
fn standard_normals(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim);
    while out.len() < dim {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        out.push(r * c);
        if out.len() < dim {
            out.push(r * s);
        }
    }
    out
}

/// The Gaussian noise vector for one sample, fully determined by
/// `(seed, instance_id, index)`.
pub fn noise_for_sample<T: Real>(
    seed: u64,
    instance_id: &str,
    index: u64,
    dim: usize,
    sigma: T,
) -> Vec<T> {
    let mut rng = ChaCha8Rng::from_seed(sample_key(seed, instance_id, index));
    standard_normals(&mut rng, dim)
        .into_iter()
        .map(|z| sigma * cast::<T>(z))
        .collect()
}

/// The n noisy copies of `point` for this instance.
pub fn random_sample<T: Real>(
    point: &[T],
    config: &SmoothingConfig<T>,
    instance_id: &str,
) -> Result<Vec<Vec<T>>> {
    config.validate()?;
    let dim = point.len();
    Ok((0..config.n)
        .into_par_iter()
        .map(|t| {
            let noise = noise_for_sample(config.seed, instance_id, t, dim, config.sigma);
            point.iter().zip(noise).map(|(x, e)| *x + e).collect()
        })
        .collect())
}

/// Run the base classifier on n noisy copies of `point` and collect per-label
/// frequencies. Counts are accumulated per thread and summed, so the result
/// does not depend on scheduling.
pub fn count_frequencies<T: Real>(
    classifier: &SyntheticClassifier<T>,
    point: &[T],
    config: &SmoothingConfig<T>,
    instance_id: &str,
    ground_truth: &[usize],
) -> Result<CertificationInstance> {
    config.validate()?;
    if classifier.k_prime() != config.k_prime {
        return Err(Error::config(format!(
            "classifier predicts k' = {} but the config says {}",
            classifier.k_prime(),
            config.k_prime
        )));
    }
    // Surface dimension mismatches before spawning work.
    classifier.scores(point)?;
    let c = classifier.num_labels();
    let dim = point.len();
    let counts = (0..config.n)
        .into_par_iter()
        .fold(
            || vec![0u64; c],
            |mut acc, t| {
                let noise: Vec<T> =
                    noise_for_sample(config.seed, instance_id, t, dim, config.sigma);
                let noisy: Vec<T> = point.iter().zip(noise).map(|(x, e)| *x + e).collect();
                let set = classifier
                    .predict_topk(&noisy)
                    .expect("dimension checked above");
                for label in set {
                    acc[label] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; c],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    CertificationInstance::new(
        instance_id.to_string(),
        c,
        config.k_prime,
        config.n,
        ground_truth.to_vec(),
        counts,
    )
}

/// First line of every counts file; readers reject anything else.
pub const COUNTS_FILE_HEADER: &str = "# multiguard-counts v1";

/// Write instances as one JSON record per line, preceded by the schema
/// header and any extra comment lines (e.g. a provenance record).
pub fn write_counts_file(
    path: &Path,
    instances: &[CertificationInstance],
    comments: &[String],
) -> Result<()> {
    for instance in instances {
        instance.validate()?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{COUNTS_FILE_HEADER}")?;
    for comment in comments {
        writeln!(out, "# {comment}")?;
    }
    for instance in instances {
        let line = serde_json::to_string(instance).expect("instance serializes");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a counts file, validating every record and reporting the 1-based
/// line number on the first violation (malformed JSON, invariant failure, or
/// duplicate id).
pub fn read_counts_file(path: &Path) -> Result<Vec<CertificationInstance>> {
    let reader = BufReader::new(File::open(path)?);
    let mut instances = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if lineno == 1 {
            if line.trim_end() != COUNTS_FILE_HEADER {
                return Err(Error::record(
                    lineno,
                    format!("expected header {COUNTS_FILE_HEADER:?}, got {line:?}"),
                ));
            }
            saw_header = true;
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let instance: CertificationInstance = serde_json::from_str(&line)
            .map_err(|e| Error::record(lineno, format!("malformed record: {e}")))?;
        instance
            .validate()
            .map_err(|e| Error::record(lineno, e.to_string()))?;
        if !seen_ids.insert(instance.id.clone()) {
            return Err(Error::record(
                lineno,
                format!("duplicate instance id {:?}", instance.id),
            ));
        }
        instances.push(instance);
    }
    if !saw_header {
        return Err(Error::record(1, "empty file: missing schema header"));
    }
    Ok(instances)
}
