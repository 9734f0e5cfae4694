//! Composite one-dimensional rules and deterministic parallel reduction.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::{lit, pairwise_sum, Real};

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1<T> {
    pub x: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Real> Rule1<T> {
    /// `panels` equal Gauss–Legendre panels of `order` nodes on [a, b].
    pub fn gauss_legendre(a: T, b: T, panels: usize, order: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
        let pairs = gl.as_node_weight_pairs();
        let h = (b - a) / lit(panels as f64);
        let mut x = Vec::with_capacity(panels * order);
        let mut w = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + h * lit(p as f64);
            for &(t, wt) in pairs {
                x.push(lo + h * lit((t + 1.0) * 0.5));
                w.push(h * lit(wt * 0.5));
            }
        }
        Rule1 { x, w }
    }

    /// Periodic trapezoid rule with `m` nodes on [0, 2π).
    pub fn periodic(m: usize) -> Self {
        let h = T::TAU() / lit(m as f64);
        Rule1 { x: (0..m).map(|k| h * lit(k as f64)).collect(), w: vec![h; m] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        let v: Vec<T> = self.x.iter().zip(&self.w).map(|(&x, &w)| f(x) * w).collect();
        pairwise_sum(&v, T::zero())
    }
}

/// Evaluates `f` on every item in parallel and sums in a fixed pairwise order,
/// so the result does not depend on the number of worker threads.
pub fn par_sum<T, I, F>(items: &[I], f: F) -> T
where
    T: Real,
    I: Sync,
    F: Fn(&I) -> T + Sync + Send,
{
    let vals: Vec<T> = items.par_iter().map(f).collect();
    pairwise_sum(&vals, T::zero())
}

/// Like [`par_sum`] for fallible evaluations; the first error in item order wins.
pub fn try_par_sum<V, I, F>(items: &[I], zero: V, f: F) -> Result<V>
where
    V: Copy + std::ops::Add<Output = V> + Send,
    I: Sync,
    F: Fn(&I) -> Result<V> + Sync + Send,
{
    let vals: Vec<Result<V>> = items.par_iter().map(f).collect();
    let vals: Result<Vec<V>> = vals.into_iter().collect();
    Ok(pairwise_sum(&vals?, zero))
}
