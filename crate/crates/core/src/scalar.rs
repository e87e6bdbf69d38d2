//! Floating-point abstraction shared by every solver routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A comparison tolerance no finer than the type can resolve.
    ///
    /// For `f64` this is `base` itself for every tolerance used in the crate;
    /// for `f32` it is floored at a few ulps of one.
    #[inline]
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(base).max(floor)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sign of `x` with everything inside `[-tol, tol]` mapped to zero.
pub(crate) fn sign_with_tol<T: Scalar>(x: T, tol: T) -> std::cmp::Ordering {
    if x > tol {
        std::cmp::Ordering::Greater
    } else if x < -tol {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}
