//! Scalar abstraction for the numeric pipeline.
//!
//! Everything downstream of the combinatorics (weights, diagrams, feature
//! vectors, heat) is generic over a floating scalar. `f64` is the intended
//! production type and the one the I/O layer speaks; `f32` works for the
//! value-level math. Exact rational arithmetic is confined to the geometric
//! predicates and never leaks into these APIs.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating scalar used by weights, diagrams and feature vectors.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`. Exact when `Self` is `f64`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    /// Widening conversion to `f64`. Exact for `f32` and `f64`, including
    /// infinities.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip_for_f64() {
        let x: f64 = Real::of(1.25);
        assert_eq!(x, 1.25);
        assert_eq!(x.as_f64(), 1.25);
        assert!(f64::infinity().as_f64().is_infinite());
    }

    #[test]
    fn f32_is_usable() {
        let x: f32 = Real::of(0.5);
        assert_eq!(x, 0.5f32);
    }
}
