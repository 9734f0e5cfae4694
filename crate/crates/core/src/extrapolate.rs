//! Extrapolation to zero and rate fitting for sequences of finite-R evaluations.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Value at h = 0 of the polynomial through (h_k, f_k), by Neville's scheme.
///
/// With three halving steps and an expansion f0 + c₁h + c₂h² this is
/// (8f₃ − 6f₂ + f₁)/3.
pub fn richardson<T: Real>(hs: &[T], fs: &[T]) -> Result<T> {
    if hs.len() != fs.len() || hs.is_empty() {
        return Err(Error::Invalid("richardson needs matching nonempty samples".into()));
    }
    let mut p = fs.to_vec();
    let m = hs.len();
    for k in 1..m {
        for i in 0..m - k {
            let (a, b) = (hs[i], hs[i + k]);
            if a == b {
                return Err(Error::Invalid("repeated abscissa".into()));
            }
            // evaluate at 0
            p[i] = (b * p[i] - a * p[i + 1]) / (b - a);
        }
    }
    Ok(p[0])
}

/// Least-squares slope of log|y| against log x.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Invalid("slope needs at least two points".into()));
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.abs().ln()).collect();
    let m = T::from_usize(xs.len()).unwrap();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / m;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / m;
    let mut num = T::zero();
    let mut den = T::zero();
    for (x, y) in lx.iter().zip(&ly) {
        num = num + (*x - mx) * (*y - my);
        den = den + (*x - mx) * (*x - mx);
    }
    if den == T::zero() {
        return Err(Error::Invalid("degenerate abscissae".into()));
    }
    Ok(num / den)
}
