use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type used for feature values, weights and coefficients.
///
/// Implemented for `f32` and `f64`. Anything needing `exp`/`ln` (the AdaBoost
/// update) rules out exact rationals, so the bound is [`Float`].
pub trait Scalar:
    'static
    + Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
{
    /// Allowed deviation of a weight vector's sum from 1.
    fn weight_tolerance() -> Self;

    /// Slack used when collecting near-optimal stump candidates for exact
    /// re-scoring. Must exceed the accumulated rounding of a length-m sum.
    fn rescore_slack() -> Self;

    /// Converts an `f64` literal. Total for the implemented types.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Scalar for f64 {
    fn weight_tolerance() -> Self {
        1e-9
    }
    fn rescore_slack() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn weight_tolerance() -> Self {
        1e-4
    }
    fn rescore_slack() -> Self {
        1e-4
    }
}
