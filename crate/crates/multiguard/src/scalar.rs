use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Scalar type the numeric core is generic over: `f32` or `f64`.
///
/// The documented accuracy targets (1e-10 and tighter) are only attainable
/// with `f64`; `f32` keeps the same algorithms and saturation behavior at
/// reduced precision. The crate root exports `f64` aliases for the main
/// types, and the pipeline (files, CLI) is `f64` throughout.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert to the scalar type")
}

/// Convert a usize (counts, ranks) into the working scalar type.
#[inline]
pub(crate) fn cast_usize<T: Real>(x: usize) -> T {
    T::from_usize(x).expect("usize must convert to the scalar type")
}
