//! Numeric abstractions shared by the distance, inequality and statistics code.
//!
//! Everything that only needs field arithmetic (distances, Gini, precision and
//! recall, kappa, Cliff's delta) is written against [`Scalar`], so it runs on
//! `f32`, `f64` and on exact rationals such as [`num_rational::Rational64`].
//! Code that needs logarithms or square roots asks for [`Real`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A number type closed under `+ - * /` with a total-enough ordering.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts an item count. Panics only if the count does not fit the type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(self) -> Self {
        self / Self::two()
    }

    fn abs_diff(self, other: Self) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    fn magnitude(self) -> Self {
        if self < Self::zero() {
            Self::zero() - self
        } else {
            self
        }
    }

    /// Lossy conversion for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// A floating-point [`Scalar`].
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}
