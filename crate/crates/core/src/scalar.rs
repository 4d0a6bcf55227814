//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Serialize + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot hold it at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Probability-weighted inner product `sum_i p_i x_i y_i`.
pub(crate) fn weighted_dot<T: Scalar>(p: &[T], x: &[T], y: &[T]) -> T {
    p.iter()
        .zip(x)
        .zip(y)
        .map(|((&p, &x), &y)| p * x * y)
        .fold(T::zero(), |a, b| a + b)
}
