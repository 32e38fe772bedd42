//! Scalar abstraction for the linear-algebra layer.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type accepted by the sparse/dense kernels and solvers.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Copy + Send + Sync + Debug + Display + 'static
{
    /// Lossy conversion from `f64`, used for tolerances and literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Sum + Copy + Send + Sync + Debug + Display + 'static
{
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub(crate) fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
