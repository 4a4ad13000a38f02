use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the discretization is generic over.
///
/// Implemented for `f32` and `f64`. Everything the solver needs beyond field
/// arithmetic (powers, square roots, exponentials, π) comes from [`Float`] and
/// [`FloatConst`].
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Panics only if the target type cannot
    /// represent finite `f64` literals, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("scalar conversion from f64")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("scalar conversion from usize")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}
