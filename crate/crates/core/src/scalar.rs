//! Scalar abstraction for the numerical kernels.
//!
//! Every routine in this crate is generic over [`Scalar`] so the same code
//! instantiates at `f32` and `f64`. The shipped tooling uses `f64`; the `f32`
//! instantiation exists for cheap precision experiments and is exercised by a
//! smoke test.

use core::fmt::{Debug, Display};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar with the conversions the solvers need.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from a literal. Panics only for values a float cannot
    /// represent at all, which no call site passes.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in any float type")
    }

    /// Exact conversion from a small integer (mode numbers, counts).
    fn of_i32(x: i32) -> Self {
        Self::from_i32(x).expect("i32 representable in any float type")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("count representable in any float type")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm<T: Scalar>(x: T, y: T) -> T {
        (x * x + y * y).sqrt()
    }

    #[test]
    fn instantiates_for_both_widths() {
        assert_eq!(norm(3.0f64, 4.0f64), 5.0f64);
        assert_eq!(norm(3.0f32, 4.0f32), 5.0f32);
        assert_eq!(f64::of_i32(-7), -7.0);
        assert_eq!(f32::of(0.5), 0.5f32);
    }
}
