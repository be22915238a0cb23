//! Floating-point scalar abstraction for the closed-form layer.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Scalar type the closed-form layer is generic over: f32 or f64.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an f64 literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to Real")
    }

    fn half() -> Self {
        Self::of(0.5)
    }

    fn two() -> Self {
        Self::of(2.0)
    }

    /// usize conversion, used for dimension counts in formulas.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Squared Euclidean norm of a coordinate slice.
pub fn norm_sq<R: Real>(x: &[R]) -> R {
    x.iter().map(|&c| c * c).sum()
}

/// Euclidean inner product.
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&p, &q)| p * q).sum()
}

/// Euclidean norm.
pub fn norm<R: Real>(x: &[R]) -> R {
    norm_sq(x).sqrt()
}
