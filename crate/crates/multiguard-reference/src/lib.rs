//! Independent reference implementations for cross-checking the `multiguard`
//! crate in tests.
//!
//! Everything in here trades speed for transparency: series and continued
//! fractions instead of tuned rational approximations, adaptive quadrature
//! instead of special-function identities, dense grid scans instead of
//! closed-form partitions, and a straight-line rewrite of the certification
//! condition. None of this code is shared with the main crate, so agreement
//! between the two is meaningful evidence of correctness.

pub mod beta;
pub mod certify;
pub mod gauss;
pub mod line;
pub mod rng;

pub use beta::{beta_cdf, beta_quantile};
pub use certify::certified_size_direct;
pub use gauss::{erf, erfc, normal_cdf, normal_quantile};
pub use line::{mc_label_frequencies, scan_partition, top_k_by_score};
pub use rng::SplitMix64;
