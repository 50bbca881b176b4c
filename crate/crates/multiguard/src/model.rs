//! Analytically tractable base multi-label classifiers: per-label affine
//! scores in one or two dimensions with deterministic top-k' prediction.
//! In one dimension the real line splits into finitely many intervals on
//! which the predicted set is constant, which gives exact label
//! probabilities under Gaussian input noise.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gaussian_cdf, Probability};
use crate::scalar::Real;

/// One label's affine score: `weights . point + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct LabelScore<T: Real> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Real> LabelScore<T> {
    fn eval(&self, point: &[T]) -> T {
        let mut acc = self.bias;
        for (w, x) in self.weights.iter().zip(point) {
            acc = acc + *w * *x;
        }
        acc
    }
}

/// Indices of the k largest scores, ties broken toward the smaller label
/// index; the result is sorted ascending. Panics if k exceeds the number of
/// scores or any score is NaN (classifier construction rules both out).
pub fn top_k_indices<T: PartialOrd + Copy>(scores: &[T], k: usize) -> Vec<usize> {
    assert!(k <= scores.len(), "k larger than the number of labels");
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        scores[j]
            .partial_cmp(&scores[i])
            .expect("scores must not be NaN")
            .then(i.cmp(&j))
    });
    order.truncate(k);
    order.sort_unstable();
    order
}

/// A base multi-label classifier with affine per-label scores that predicts
/// exactly `k_prime` labels for every input. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct SyntheticClassifier<T: Real> {
    dimension: usize,
    k_prime: usize,
    labels: Vec<LabelScore<T>>,
}

impl<T: Real> SyntheticClassifier<T> {
    pub fn new(dimension: usize, k_prime: usize, labels: Vec<LabelScore<T>>) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::config(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if labels.is_empty() {
            return Err(Error::config("classifier needs at least one label"));
        }
        if k_prime < 1 || k_prime > labels.len() {
            return Err(Error::config(format!(
                "k_prime must be in 1..={}, got {k_prime}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.weights.len() != dimension {
                return Err(Error::config(format!(
                    "label {i}: weight vector has length {}, expected {dimension}",
                    label.weights.len()
                )));
            }
            if !label.bias.is_finite() || label.weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::config(format!(
                    "label {i}: weights and bias must be finite"
                )));
            }
        }
        Ok(Self {
            dimension,
            k_prime,
            labels,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    /// Number of labels c.
    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    fn check_point(&self, point: &[T]) -> Result<()> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: point.len(),
            });
        }
        Ok(())
    }

    /// All label scores at a point.
    pub fn scores(&self, point: &[T]) -> Result<Vec<T>> {
        self.check_point(point)?;
        Ok(self.labels.iter().map(|l| l.eval(point)).collect())
    }

    /// The k' labels with the largest scores, sorted ascending; ties go to
    /// the smaller label index so prediction is deterministic.
    pub fn predict_topk(&self, point: &[T]) -> Result<Vec<usize>> {
        let scores = self.scores(point)?;
        Ok(top_k_indices(&scores, self.k_prime))
    }

    /// 1-D slopes and biases. Only valid for dimension 1.
    fn lines(&self) -> Vec<(T, T)> {
        debug_assert_eq!(self.dimension, 1);
        self.labels.iter().map(|l| (l.weights[0], l.bias)).collect()
    }

    /// Partition the real line at the points where the top-k' set changes.
    ///
    /// Candidate cuts are pairwise score crossings; intervals whose top set
    /// matches the neighbor are merged away, so every remaining breakpoint
    /// witnesses an actual set change. Labels with identical affine scores
    /// never cross and are ordered by the index tie-break throughout.
    pub fn partition_line(&self) -> Result<IntervalPartition<T>> {
        if self.dimension != 1 {
            return Err(Error::Unsupported(
                "line partition requires a 1-D classifier".into(),
            ));
        }
        let lines = self.lines();
        let mut cuts: Vec<T> = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (ai, bi) = lines[i];
                let (aj, bj) = lines[j];
                if ai != aj {
                    let w = (bj - bi) / (ai - aj);
                    if w.is_finite() {
                        cuts.push(w);
                    }
                }
            }
        }
        cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite cuts"));
        cuts.dedup();

        // Evaluate the top set strictly inside each candidate interval. A
        // candidate interval too narrow to contain a representable interior
        // point is dropped (it carries no probability mass).
        let mut breakpoints: Vec<T> = Vec::new();
        let mut top_sets: Vec<Vec<usize>> = Vec::new();
        let probe = |w: T| -> Vec<usize> {
            let scores: Vec<T> = lines.iter().map(|&(a, b)| a * w + b).collect();
            top_k_indices(&scores, self.k_prime)
        };
        let one = T::one();
        let first_probe = match cuts.first() {
            Some(&w0) => w0 - one,
            None => T::zero(),
        };
        top_sets.push(probe(first_probe));
        for (idx, &cut) in cuts.iter().enumerate() {
            let interior = match cuts.get(idx + 1) {
                Some(&next) => {
                    let mid = (cut + next) / (one + one);
                    if mid <= cut || mid >= next {
                        continue;
                    }
                    mid
                }
                None => cut + one,
            };
            let set = probe(interior);
            if set != *top_sets.last().expect("nonempty") {
                breakpoints.push(cut);
                top_sets.push(set);
            }
        }
        Ok(IntervalPartition {
            num_labels: self.labels.len(),
            breakpoints,
            top_sets,
        })
    }

    /// Exact label probabilities for a 1-D classifier under isotropic
    /// Gaussian noise centered at `center`: each interval on which label i is
    /// predicted contributes its Gaussian measure. The probabilities sum to
    /// k' by construction.
    pub fn exact_label_probabilities(
        &self,
        center: T,
        sigma: T,
    ) -> Result<Vec<Probability<T>>> {
        let partition = self.partition_line()?;
        partition.label_probabilities(center, sigma)
    }
}

/// The real line cut into intervals with a constant top-k' set on each.
/// `top_sets` has exactly one more entry than `breakpoints`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPartition<T: Real> {
    num_labels: usize,
    breakpoints: Vec<T>,
    top_sets: Vec<Vec<usize>>,
}

impl<T: Real> IntervalPartition<T> {
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn top_sets(&self) -> &[Vec<usize>] {
        &self.top_sets
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Index of the interval containing `w`: the number of breakpoints <= w.
    /// Exactly at a breakpoint this selects the right-hand interval.
    pub fn interval_index(&self, w: T) -> usize {
        self.breakpoints.partition_point(|b| *b <= w)
    }

    pub fn top_set_at(&self, w: T) -> &[usize] {
        &self.top_sets[self.interval_index(w)]
    }

    /// Per-label probability of appearing in the top-k' set when the input is
    /// `center` plus N(0, sigma^2) noise.
    pub fn label_probabilities(&self, center: T, sigma: T) -> Result<Vec<Probability<T>>> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        if !center.is_finite() {
            return Err(Error::domain(format!("center must be finite, got {center}")));
        }
        let mut probs = vec![T::zero(); self.num_labels];
        let mut lower_cdf = T::zero(); // CDF at the interval's left edge
        for (i, set) in self.top_sets.iter().enumerate() {
            let upper_cdf = match self.breakpoints.get(i) {
                Some(&b) => gaussian_cdf((b - center) / sigma)?.value(),
                None => T::one(),
            };
            let mass = (upper_cdf - lower_cdf).max(T::zero());
            for &label in set {
                probs[label] = probs[label] + mass;
            }
            lower_cdf = upper_cdf;
        }
        Ok(probs.into_iter().map(Probability::clamped).collect())
    }
}

/// On-disk classifier description plus the evaluation inputs, as consumed by
/// the CLI. JSON with the exact field names shown in the README.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub dimension: usize,
    pub num_labels: usize,
    pub k_prime: usize,
    pub labels: Vec<LabelSpec>,
    #[serde(default)]
    pub inputs: Vec<InputSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelSpec {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputSpec {
    pub id: String,
    pub point: Vec<f64>,
    pub ground_truth: Vec<usize>,
}

impl ClassifierSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let spec: ClassifierSpec = serde_json::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let text = serde_json::to_string_pretty(self).expect("spec serializes");
        fs::write(path, text)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.num_labels {
            return Err(Error::config(format!(
                "num_labels is {} but {} labels are listed",
                self.num_labels,
                self.labels.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for input in &self.inputs {
            if input.id.is_empty() || input.id.contains(['\n', ',']) {
                return Err(Error::config(format!(
                    "input id {:?} must be nonempty without newlines or commas",
                    input.id
                )));
            }
            if !seen.insert(input.id.as_str()) {
                return Err(Error::config(format!("duplicate input id {:?}", input.id)));
            }
            if input.point.len() != self.dimension {
                return Err(Error::config(format!(
                    "input {:?}: point has dimension {}, expected {}",
                    input.id,
                    input.point.len(),
                    self.dimension
                )));
            }
            if input.ground_truth.is_empty() {
                return Err(Error::config(format!(
                    "input {:?}: ground truth must be nonempty",
                    input.id
                )));
            }
            let mut gt = input.ground_truth.clone();
            gt.sort_unstable();
            gt.dedup();
            if gt.len() != input.ground_truth.len() {
                return Err(Error::config(format!(
                    "input {:?}: duplicate ground-truth labels",
                    input.id
                )));
            }
            if gt.iter().any(|&l| l >= self.num_labels) {
                return Err(Error::config(format!(
                    "input {:?}: ground-truth label out of range",
                    input.id
                )));
            }
        }
        Ok(())
    }

    /// Build the classifier this spec describes.
    pub fn classifier(&self) -> Result<SyntheticClassifier<f64>> {
        let labels = self
            .labels
            .iter()
            .map(|l| LabelScore {
                weights: l.weights.clone(),
                bias: l.bias,
            })
            .collect();
        SyntheticClassifier::new(self.dimension, self.k_prime, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn steepest_slope_wins_at_positive_point() {
        // s_j(w) = j*w: at w = 1 the largest slope has the largest score.
        let clf = line_classifier(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1);
        assert_eq!(clf.predict_topk(&[1.0]).unwrap(), vec![2]);
    }

    #[test]
    fn k_prime_equal_c_selects_everything() {
        let clf = line_classifier(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 3);
        assert_eq!(clf.predict_topk(&[-3.4]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn top_k_selection_on_raw_scores() {
        // Four quadratic scores -(w-j)^2 evaluated at w = 1.4.
        let w = 1.4;
        let scores: Vec<f64> = (0..4).map(|j| -(w - j as f64).powi(2)).collect();
        assert_eq!(top_k_indices(&scores, 2), vec![1, 2]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 1);
        assert!(matches!(
            clf.predict_topk(&[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partition_single_crossing() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 1);
        let p = clf.partition_line().unwrap();
        assert_eq!(p.breakpoints(), &[0.0]);
        assert_eq!(p.top_sets(), &[vec![1], vec![0]]);
        // Tie at the breakpoint goes to label 0, matching the right interval.
        assert_eq!(clf.predict_topk(&[0.0]).unwrap(), vec![0]);
        assert_eq!(p.top_set_at(0.0), &[0]);
    }

    #[test]
    fn partition_with_all_labels_selected_never_changes() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 2);
        let p = clf.partition_line().unwrap();
        assert!(p.breakpoints().is_empty());
        assert_eq!(p.top_sets(), &[vec![0, 1]]);
    }

    #[test]
    fn identical_scores_yield_no_breakpoint() {
        let clf = line_classifier(&[(1.0, 2.0), (1.0, 2.0)], 1);
        let p = clf.partition_line().unwrap();
        assert!(p.breakpoints().is_empty());
        assert_eq!(p.top_sets(), &[vec![0]]);
    }

    #[test]
    fn exact_probabilities_trivial_cases() {
        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 2);
        let p = clf.exact_label_probabilities(0.3, 0.5).unwrap();
        assert_eq!(p[0].value(), 1.0);
        assert_eq!(p[1].value(), 1.0);

        let clf = line_classifier(&[(1.0, 0.0), (-1.0, 0.0)], 1);
        let p = clf.exact_label_probabilities(0.0, 0.7).unwrap();
        assert!((p[0].value() - 0.5).abs() < 1e-15);
        assert!((p[1].value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_probabilities_require_dimension_one() {
        let labels = vec![
            LabelScore {
                weights: vec![1.0, 0.0],
                bias: 0.0,
            },
            LabelScore {
                weights: vec![0.0, 1.0],
                bias: 0.0,
            },
        ];
        let clf = SyntheticClassifier::new(2, 1, labels).unwrap();
        assert!(matches!(
            clf.exact_label_probabilities(0.0, 1.0),
            Err(Error::Unsupported(_))
        ));
        // 2-D prediction itself works.
        assert_eq!(clf.predict_topk(&[2.0, 1.0]).unwrap(), vec![0]);
    }

    #[test]
    fn probabilities_sum_to_k_prime() {
        let clf = line_classifier(
            &[(1.3, -0.2), (-0.7, 0.4), (0.1, 0.9), (2.0, -1.5)],
            2,
        );
        let p = clf.exact_label_probabilities(0.25, 0.6).unwrap();
        let sum: f64 = p.iter().map(|q| q.value()).sum();
        assert!((sum - 2.0).abs() < 1e-10, "sum = {sum}");
    }

    #[test]
    fn classifier_spec_rejects_bad_inputs() {
        let spec = ClassifierSpec {
            dimension: 1,
            num_labels: 2,
            k_prime: 1,
            labels: vec![
                LabelSpec {
                    weights: vec![1.0],
                    bias: 0.0,
                },
                LabelSpec {
                    weights: vec![-1.0],
                    bias: 0.0,
                },
            ],
            inputs: vec![InputSpec {
                id: "a".into(),
                point: vec![0.0],
                ground_truth: vec![5],
            }],
        };
        assert!(spec.validate().is_err());
    }
}
