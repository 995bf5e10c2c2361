use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point types the LP engine can run on.
///
/// Implemented for `f32` and `f64`. The default tolerance is used for pivot selection,
/// for snapping tiny coefficients to zero, and for residual checks.
pub trait Scalar:
    'static + Float + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync
{
    fn default_tolerance() -> Self;

    /// Converts an `f64` constant. Panics only if the target type cannot hold finite values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("scalar conversion")
    }
}

impl Scalar for f64 {
    #[inline]
    fn default_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn default_tolerance() -> Self {
        1e-4
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
