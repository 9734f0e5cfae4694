use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the whole library is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in T")
}

#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().expect("finite scalar")
}

/// Tolerance record threaded through the checks. Tests may tighten it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol<T> {
    /// Absolute slack for identities on unit-scale data.
    pub eq: T,
    /// Minimum |W_I| accepted for a generic weight vector.
    pub wall: T,
    /// Relative slack for proportionality of vectors.
    pub prop: T,
}

impl<T: Real> Default for Tol<T> {
    fn default() -> Self {
        // 1e-12 for f64; f32 cannot resolve that, so fall back to a few hundred ulps.
        let floor = T::epsilon() * lit(256.0);
        Tol {
            eq: lit::<T>(1e-12).max(floor),
            wall: lit::<T>(1e-9).max(floor),
            prop: lit::<T>(1e-9).max(floor),
        }
    }
}

/// Sums in a fixed pairwise tree, so the result depends only on the order of `xs`.
pub fn pairwise_sum<T: Copy + std::ops::Add<Output = T>>(xs: &[T], zero: T) -> T {
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n if n <= 8 => xs[1..].iter().fold(xs[0], |a, &b| a + b),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l, zero) + pairwise_sum(r, zero)
        }
    }
}
