use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num};

/// Coefficient field for polynomial arithmetic.
///
/// Exact rationals are the intended instance; `f64` is used where numeric
/// values have already been substituted.
pub trait Coefficient:
    Num
    + FromPrimitive
    + Neg<Output = Self>
    + Clone
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Coefficient for T where
    T: Num
        + FromPrimitive
        + Neg<Output = T>
        + Clone
        + PartialOrd
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar for the numeric routines (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("float literal out of range")
    }
}

impl Real for f32 {}
impl Real for f64 {}
