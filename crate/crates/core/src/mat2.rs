//! 2×2 complex kernel: column vectors, row covectors, matrices and hermitian metrics.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(v: T) -> C<T> {
    Complex::new(v, T::zero())
}

/// Column vector in ℂ².
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2<T>(pub [C<T>; 2]);

/// Row covector acting on [`Vec2`] by row-times-column.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Covec2<T>(pub [C<T>; 2]);

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2<T>(pub [[C<T>; 2]; 2]);

/// Hermitian 2×2 matrix, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Herm2<T>(Mat2<T>);

impl<T: Real> Vec2<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Vec2([a, b])
    }
    pub fn real(a: T, b: T) -> Self {
        Vec2([re(a), re(b)])
    }
    pub fn zero() -> Self {
        Vec2([C::new(T::zero(), T::zero()); 2])
    }
    pub fn norm_sqr(&self) -> T {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
    /// Conjugate transpose.
    pub fn dagger(&self) -> Covec2<T> {
        Covec2([self.0[0].conj(), self.0[1].conj()])
    }
    pub fn scale(&self, s: C<T>) -> Self {
        Vec2([self.0[0] * s, self.0[1] * s])
    }
    /// Rank-one matrix `self · w`.
    pub fn outer(&self, w: &Covec2<T>) -> Mat2<T> {
        Mat2([
            [self.0[0] * w.0[0], self.0[0] * w.0[1]],
            [self.0[1] * w.0[0], self.0[1] * w.0[1]],
        ])
    }
    /// `x₁y₂ − x₂y₁`, zero iff the vectors are proportional.
    pub fn cross(&self, o: &Vec2<T>) -> C<T> {
        self.0[0] * o.0[1] - self.0[1] * o.0[0]
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Covec2<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Covec2([a, b])
    }
    pub fn real(a: T, b: T) -> Self {
        Covec2([re(a), re(b)])
    }
    pub fn zero() -> Self {
        Covec2([C::new(T::zero(), T::zero()); 2])
    }
    pub fn norm_sqr(&self) -> T {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
    pub fn dagger(&self) -> Vec2<T> {
        Vec2([self.0[0].conj(), self.0[1].conj()])
    }
    pub fn scale(&self, s: C<T>) -> Self {
        Covec2([self.0[0] * s, self.0[1] * s])
    }
    /// Contraction `y·x`.
    pub fn apply(&self, x: &Vec2<T>) -> C<T> {
        self.0[0] * x.0[0] + self.0[1] * x.0[1]
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, cc: C<T>, d: C<T>) -> Self {
        Mat2([[a, b], [cc, d]])
    }
    pub fn real(a: T, b: T, cc: T, d: T) -> Self {
        Mat2([[re(a), re(b)], [re(cc), re(d)]])
    }
    pub fn zero() -> Self {
        Mat2([[C::new(T::zero(), T::zero()); 2]; 2])
    }
    pub fn identity() -> Self {
        Self::diag(re(T::one()), re(T::one()))
    }
    pub fn diag(a: C<T>, d: C<T>) -> Self {
        let z = re(T::zero());
        Mat2([[a, z], [z, d]])
    }
    pub fn trace(&self) -> C<T> {
        self.0[0][0] + self.0[1][1]
    }
    pub fn det(&self) -> C<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }
    pub fn scale(&self, s: C<T>) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }
    pub fn scale_re(&self, s: T) -> Self {
        self.scale(re(s))
    }
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() || !d.norm().is_finite() {
            return None;
        }
        let m = &self.0;
        let inv = d.inv();
        Some(Mat2([[m[1][1] * inv, -m[0][1] * inv], [-m[1][0] * inv, m[0][0] * inv]]))
    }
    pub fn mul_vec(&self, x: &Vec2<T>) -> Vec2<T> {
        let m = &self.0;
        Vec2([m[0][0] * x.0[0] + m[0][1] * x.0[1], m[1][0] * x.0[0] + m[1][1] * x.0[1]])
    }
    /// Covector times matrix, `y·A`.
    pub fn left_mul(&self, y: &Covec2<T>) -> Covec2<T> {
        let m = &self.0;
        Covec2([y.0[0] * m[0][0] + y.0[1] * m[1][0], y.0[0] * m[0][1] + y.0[1] * m[1][1]])
    }
    pub fn commutator(&self, o: &Self) -> Self {
        *self * *o - *o * *self
    }
    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |a, z| a + z.norm_sqr())
    }
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |a, z| a.max(z.norm()))
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
    /// Exponential in closed form via A = (tr/2)·Id + K with K² = −det K · Id.
    pub fn exp(&self) -> Self {
        let half = self.trace() * re(lit::<T>(0.5));
        let k = traceless(self);
        let k2 = -k.det();
        let s = k2.sqrt();
        let (ch, shc) = if s.norm() < lit(1e-4) {
            // series for cosh s and sinh(s)/s
            let k4 = k2 * k2;
            (
                re(T::one()) + k2 * re(lit(0.5)) + k4 * re(lit(1.0 / 24.0)),
                re(T::one()) + k2 * re(lit(1.0 / 6.0)) + k4 * re(lit(1.0 / 120.0)),
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Mat2::identity().scale(ch) + k.scale(shc)).scale(half.exp())
    }
}

impl<T: Real> Index<(usize, usize)> for Mat2<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.0[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl<T: Real> AddAssign for Mat2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(re(-T::one()))
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl<T: Real> Add for Covec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Covec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl<T: Real> Sub for Covec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Covec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

/// Trace-free part `A − (tr A/2)·Id`. The diagonal is written as `(a, −a)`, so the
/// trace of the result is exactly zero.
pub fn traceless<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let d = (a.0[0][0] - a.0[1][1]) * re(lit::<T>(0.5));
    Mat2([[d, a.0[0][1]], [a.0[1][0], -d]])
}

/// `tr(A†B)`.
pub fn trace_pairing<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> C<T> {
    let (a, b) = (&a.0, &b.0);
    a[0][0].conj() * b[0][0] + a[1][0].conj() * b[1][0] + a[0][1].conj() * b[0][1] + a[1][1].conj() * b[1][1]
}

impl<T: Real> Herm2<T> {
    /// Accepts `m` if it is hermitian to `tol` entrywise, then symmetrizes it.
    pub fn new(m: Mat2<T>, tol: T) -> Result<Self> {
        let d = m - m.dagger();
        if d.max_abs() > tol {
            return Err(Error::Invalid(format!("matrix not hermitian (gap {:e})", d.max_abs().to_f64().unwrap_or(f64::NAN))));
        }
        Ok(Self::symmetrized(&m))
    }

    /// `(m + m†)/2`, no check.
    pub fn symmetrized(m: &Mat2<T>) -> Self {
        Herm2((*m + m.dagger()).scale_re(lit(0.5)))
    }

    pub fn identity() -> Self {
        Herm2(Mat2::identity())
    }

    pub fn diag(a: T, d: T) -> Self {
        Herm2(Mat2::diag(re(a), re(d)))
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (T, T) {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = self.0[(0, 1)].norm();
        let mid = (a + d) * lit(0.5);
        let rad = ((a - d) * lit(0.5)).hypot(b);
        (mid - rad, mid + rad)
    }

    pub fn is_positive(&self) -> bool {
        self.eigenvalues().0 > T::zero()
    }

    pub fn det(&self) -> T {
        self.0.det().re
    }
}

/// The h-adjoint `h⁻¹B†h`.
pub fn adjoint_wrt<T: Real>(h: &Herm2<T>, b: &Mat2<T>) -> Result<Mat2<T>> {
    if h.det().abs() < lit::<T>(1e-300).max(T::min_positive_value()) {
        return Err(Error::SingularMetric);
    }
    let hinv = h.0.inverse().ok_or(Error::SingularMetric)?;
    Ok(hinv * b.dagger() * h.0)
}

/// Unitary `U` with `Ux = (|x|, 0)ᵀ`: `U = [[x̄₁, x̄₂], [−x₂, x₁]]/|x|`.
pub fn aligning_unitary<T: Real>(x: &Vec2<T>) -> Option<Mat2<T>> {
    let n = x.norm();
    if n == T::zero() {
        return None;
    }
    let [a, b] = x.0;
    Some(Mat2::new(a.conj(), b.conj(), -b, a).scale_re(n.recip()))
}

/// Maps a traceless hermitian matrix to ℝ³ using the orthonormal basis σ_k/√2
/// (σ_k the Pauli matrices), so Frobenius norms are preserved.
pub fn su2_coords<T: Real>(m: &Mat2<T>) -> [T; 3] {
    let s = T::SQRT_2().recip();
    let a = &m.0;
    // tr(σ₁M) = M₂₁ + M₁₂, tr(σ₂M) = i(M₁₂ − M₂₁), tr(σ₃M) = M₁₁ − M₂₂
    [
        (a[1][0] + a[0][1]).re * s,
        (a[0][1] - a[1][0]).im * -s,
        (a[0][0] - a[1][1]).re * s,
    ]
}

/// Inverse of [`su2_coords`].
pub fn from_su2_coords<T: Real>(v: [T; 3]) -> Mat2<T> {
    let s = T::SQRT_2().recip();
    Mat2::new(
        re(v[2] * s),
        c(v[0] * s, -v[1] * s),
        c(v[0] * s, v[1] * s),
        re(-v[2] * s),
    )
}
