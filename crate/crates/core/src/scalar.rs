//! Scalar abstraction for probabilities and distances.
//!
//! Every measure, distance and closed form in the crate is generic over
//! [`Real`], so the same code runs in `f64` (the default, see the aliases at
//! the crate root) or `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar used for probabilities: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance for comparing two exactly computed quantities.
    fn exact_tolerance() -> Self;
}

impl Real for f64 {
    fn exact_tolerance() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn exact_tolerance() -> Self {
        1e-5
    }
}

/// Converts an `f64` literal into `R`.
#[inline]
pub fn cast<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `R`.
#[inline]
pub fn count<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("count representable in scalar type")
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<R> {
    sum: R,
    compensation: R,
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            compensation: R::zero(),
        }
    }

    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.compensation
    }
}

impl<R: Real> FromIterator<R> for CompensatedSum<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn cast_roundtrips_literals() {
        assert_eq!(cast::<f32>(0.5), 0.5f32);
        assert_eq!(count::<f64>(7), 7.0);
    }
}
