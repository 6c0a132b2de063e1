//! Floating point abstraction shared by the scoring and evaluation code.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for scores and metrics: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Lossless for counts below 2^24 (`f32`) or 2^53 (`f64`).
    #[inline]
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }

    #[inline]
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 representable")
    }

    #[inline]
    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }

    #[inline]
    fn hundred() -> Self {
        Self::from_f64_lossy(100.0)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static
{
}

/// Sign of a value, with exact zero (and NaN) treated as signless.
#[inline]
pub(crate) fn strict_sign<T: Real>(value: T) -> Option<bool> {
    if value > T::zero() {
        Some(true)
    } else if value < T::zero() {
        Some(false)
    } else {
        None
    }
}
