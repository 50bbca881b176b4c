//! Provable robustness guarantees for multi-label classifiers smoothed with
//! isotropic Gaussian noise.
//!
//! Given per-label lower/upper probability bounds for an input (estimated
//! from Monte Carlo counts via Clopper-Pearson intervals, or taken exactly
//! from the synthetic 1-D classifiers in [`model`]), the [`certifier`]
//! computes the largest number `e` of ground-truth labels guaranteed to stay
//! among the smoothed classifier's top-k predictions under any l2
//! perturbation of norm at most R, the certified radius for a target `e`,
//! and a per-label baseline for comparison. [`evaluation`] turns certified
//! sizes into certified top-k precision/recall/f1 curves, and [`attack`]
//! cross-checks certificates against an exhaustive perturbation sweep where
//! the smoothed prediction is exactly computable.
//!
//! The numeric core is generic over the scalar type ([`scalar::Real`],
//! `f32` or `f64`); the aliases below fix the `f64` instantiations used by
//! the pipeline.

pub mod attack;
pub mod bounds;
pub mod certifier;
pub mod error;
pub mod evaluation;
pub mod model;
pub mod numerics;
pub mod sampler;
pub mod scalar;

pub use attack::AttackSweep;
pub use bounds::ProbabilityBounds;
pub use certifier::{CertifiedResult, Mode};
pub use error::{Error, Result};
pub use evaluation::{MetricsRow, ResultRecord};
pub use model::{ClassifierSpec, IntervalPartition, LabelScore, SyntheticClassifier};
pub use numerics::Probability;
pub use sampler::{CertificationInstance, SmoothingConfig};
pub use scalar::Real;

/// `f64` instantiations used throughout the pipeline.
pub type Probability64 = Probability<f64>;
pub type SyntheticClassifier64 = SyntheticClassifier<f64>;
pub type IntervalPartition64 = IntervalPartition<f64>;
pub type SmoothingConfig64 = SmoothingConfig<f64>;
pub type ProbabilityBounds64 = ProbabilityBounds<f64>;
pub type CertifiedResult64 = CertifiedResult<f64>;
pub type AttackSweep64 = AttackSweep<f64>;
pub type MetricsRow64 = MetricsRow<f64>;
pub type ResultRecord64 = ResultRecord<f64>;
