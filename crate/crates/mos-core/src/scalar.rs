//! Floating-point scalar abstraction: everything numeric in this crate is
//! generic over `Scalar`, instantiated with `f32` or `f64`.

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Scalar:
    Float + FromPrimitive + NumAssign + Default + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + NumAssign
        + Default
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar.
#[inline]
pub fn s<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 -> scalar conversion")
}

/// Shorthand for converting the working scalar into `f64`.
#[inline]
pub fn to_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().expect("scalar -> f64 conversion")
}
