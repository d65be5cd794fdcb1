//! Scalar abstraction for the numerical kernels.

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Any floating-point scalar the kernels can run on: `f32` or `f64` in
/// practice. Statistics (Pearson sums, convergence slopes) are always
/// accumulated in `f64` regardless of the working scalar.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Convert a configuration constant into the working scalar.
    ///
    /// Panics on values outside the scalar's range; constants in this crate
    /// are all small, so conversion never fails in practice.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Widen to `f64` for statistics accumulation.
    fn widen(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<R: Real>(xs: &[R]) -> R {
        xs.iter().fold(R::zero(), |acc, &x| acc + x * x)
    }

    #[test]
    fn generic_kernel_runs_on_both_widths() {
        assert_eq!(sum_of_squares(&[1.0f64, 2.0, 3.0]), 14.0);
        assert_eq!(sum_of_squares(&[1.0f32, 2.0, 3.0]), 14.0);
    }

    #[test]
    fn widen_round_trips_exactly_for_f32() {
        let x = 0.1f32;
        assert_eq!(x.widen() as f32, x);
    }
}
