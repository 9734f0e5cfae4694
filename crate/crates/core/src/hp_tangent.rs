//! Tangent vectors to hyperpolygon space, the flat hyperkähler metric on unitary
//! lifts, the holomorphic symplectic pairing and the flag gauge correction.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hyperpolygon::{mu_real, QuiverRep};
use crate::mat2::{c, re, traceless, Covec2, Mat2, Vec2, C};
use crate::scalar::{lit, to_f64, Real};

/// A deformation (ẋ, ẏ) of a [`QuiverRep`].
#[derive(Clone, Debug, PartialEq)]
pub struct TangentHP<T> {
    pub xdot: Vec<Vec2<T>>,
    pub ydot: Vec<Covec2<T>>,
}

impl<T: Real> TangentHP<T> {
    pub fn zero(n: usize) -> Self {
        TangentHP { xdot: vec![Vec2::zero(); n], ydot: vec![Covec2::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.xdot.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        TangentHP {
            xdot: self.xdot.iter().zip(&o.xdot).map(|(a, b)| *a + *b).collect(),
            ydot: self.ydot.iter().zip(&o.ydot).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        TangentHP {
            xdot: self.xdot.iter().map(|v| v.scale(s)).collect(),
            ydot: self.ydot.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> TangentHP<U> {
        let cv = |z: &C<T>| c(lit::<U>(to_f64(z.re)), lit::<U>(to_f64(z.im)));
        TangentHP {
            xdot: self.xdot.iter().map(|v| Vec2([cv(&v.0[0]), cv(&v.0[1])])).collect(),
            ydot: self.ydot.iter().map(|v| Covec2([cv(&v.0[0]), cv(&v.0[1])])).collect(),
        }
    }

    /// Real coordinates: per branch re/im of ẋ₁, ẋ₂, ẏ₁, ẏ₂.
    fn to_real(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(8 * self.n());
        for (x, y) in self.xdot.iter().zip(&self.ydot) {
            for z in x.0.iter().chain(y.0.iter()) {
                out.push(to_f64(z.re));
                out.push(to_f64(z.im));
            }
        }
        out
    }

    fn from_real(v: &[f64]) -> Self {
        let n = v.len() / 8;
        let z = |k: usize| c(lit::<T>(v[k]), lit::<T>(v[k + 1]));
        TangentHP {
            xdot: (0..n).map(|i| Vec2([z(8 * i), z(8 * i + 2)])).collect(),
            ydot: (0..n).map(|i| Covec2([z(8 * i + 4), z(8 * i + 6)])).collect(),
        }
    }
}

/// Vector field generated by ξ = (A, λ) ∈ 𝔰𝔩(2,ℂ) ⊕ ℂⁿ: (A x_i − x_i λ_i, λ_i y_i − y_i A).
pub fn infinitesimal_action<T: Real>(a: &Mat2<T>, lam: &[C<T>], rep: &QuiverRep<T>) -> TangentHP<T> {
    let xdot = rep.x.iter().zip(lam).map(|(x, l)| a.mul_vec(x) - x.scale(*l)).collect();
    let ydot = rep.y.iter().zip(lam).map(|(y, l)| y.scale(*l) - a.left_mul(y)).collect();
    TangentHP { xdot, ydot }
}

/// dμ_ℂ(v) = (Σ (ẋ_i y_i + x_i ẏ_i)^⊥, (ẏ_i x_i + y_i ẋ_i)_i).
pub fn dmu_complex<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>) -> (Mat2<T>, Vec<C<T>>) {
    let mut m = Mat2::zero();
    let mut s = Vec::with_capacity(rep.n());
    for i in 0..rep.n() {
        m += traceless(&(v.xdot[i].outer(&rep.y[i]) + rep.x[i].outer(&v.ydot[i])));
        s.push(v.ydot[i].apply(&rep.x[i]) + rep.y[i].apply(&v.xdot[i]));
    }
    (m, s)
}

/// Residuals of the orthogonality conditions to the G_ℂ-orbit:
/// (Σ (ẋ_i x_i† − y_i† ẏ_i)^⊥, (x_i† ẋ_i − ẏ_i y_i†)_i).
pub fn orbit_orthogonality<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>) -> (Mat2<T>, Vec<C<T>>) {
    let mut m = Mat2::zero();
    let mut s = Vec::with_capacity(rep.n());
    for i in 0..rep.n() {
        m += traceless(&(v.xdot[i].outer(&rep.x[i].dagger()) - rep.y[i].dagger().outer(&v.ydot[i])));
        s.push(rep.x[i].dagger().apply(&v.xdot[i]) - v.ydot[i].apply(&rep.y[i].dagger()));
    }
    (m, s)
}

fn max_norm<T: Real>(p: &(Mat2<T>, Vec<C<T>>)) -> T {
    p.1.iter().fold(p.0.max_abs(), |a, z| a.max(z.norm()))
}

pub fn check_unitary_lift<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>, tol: T) -> bool {
    max_norm(&dmu_complex(rep, v)) <= tol && max_norm(&orbit_orthogonality(rep, v)) <= tol
}

// Real generators of the complex orbit: 𝔰𝔩(2,ℂ) (6 real) then ℂⁿ (2n real).
fn orbit_basis<T: Real>(rep: &QuiverRep<T>) -> DMatrix<f64> {
    let n = rep.n();
    let (o, z, i) = (re(T::one()), re(T::zero()), c(T::zero(), T::one()));
    let pauli = [Mat2::new(z, o, o, z), Mat2::new(z, -i, i, z), Mat2::new(o, z, z, -o)];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(6 + 2 * n);
    for s in &pauli {
        for unit in [o, i] {
            cols.push(infinitesimal_action(&s.scale(unit), &vec![z; n], rep).to_real());
        }
    }
    for j in 0..n {
        for unit in [o, i] {
            let mut lam = vec![z; n];
            lam[j] = unit;
            cols.push(infinitesimal_action(&Mat2::zero(), &lam, rep).to_real());
        }
    }
    DMatrix::from_fn(8 * n, cols.len(), |r, k| cols[k][r])
}

/// Removes the component of `v` along the complexified gauge orbit.
///
/// Normal equations with a 1e-14 Tikhonov floor. The output satisfies both the
/// linearized complex moment map and the orbit-orthogonality conditions.
pub fn project_unitary<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>) -> Result<TangentHP<T>> {
    let scale2 = to_f64(T::one().max(rep.scale() * rep.scale()));
    let (m, _) = mu_real(rep);
    let unitary = to_f64(m.norm()) / scale2;
    if unitary > 1e-8 {
        return Err(Error::NotUnitary(unitary));
    }
    let vn = to_f64(hp_norm_sq(v)).sqrt();
    let kern = to_f64(max_norm(&dmu_complex(rep, v))) / ((1.0 + vn) * scale2.sqrt());
    if kern > 1e-8 {
        return Err(Error::NotInKernel(kern));
    }
    let b = orbit_basis(rep);
    let vr = DVector::from_vec(v.to_real());
    let mut gram = b.transpose() * &b;
    for k in 0..gram.nrows() {
        gram[(k, k)] += 1e-14;
    }
    let rhs = b.transpose() * &vr;
    let coef = gram.cholesky().map(|ch| ch.solve(&rhs)).ok_or_else(|| Error::Invalid("orbit Gram matrix not positive".into()))?;
    let out = vr - b * coef;
    Ok(TangentHP::from_real(out.as_slice()))
}

/// Orthogonal projection of `v` onto ker dμ_ℂ, in f64.
pub fn project_dmu_kernel<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>) -> Result<TangentHP<T>> {
    let n = rep.n();
    let flat = |w: &TangentHP<T>| -> Vec<Complex<f64>> {
        let (m, s) = dmu_complex(rep, w);
        let mut out = vec![m.0[0][0], m.0[0][1], m.0[1][0]];
        out.extend(s);
        out.iter().map(|z| Complex::new(to_f64(z.re), to_f64(z.im))).collect()
    };
    let mut cols = Vec::with_capacity(4 * n);
    for k in 0..4 * n {
        let mut e = TangentHP::zero(n);
        let one = re(T::one());
        let (i, slot) = (k / 4, k % 4);
        match slot {
            0 | 1 => e.xdot[i].0[slot] = one,
            _ => e.ydot[i].0[slot - 2] = one,
        }
        cols.push(flat(&e));
    }
    let a = DMatrix::from_fn(3 + n, 4 * n, |r, k| cols[k][r]);
    let vc = DVector::from_iterator(
        4 * n,
        (0..n).flat_map(|i| [v.xdot[i].0[0], v.xdot[i].0[1], v.ydot[i].0[0], v.ydot[i].0[1]])
            .map(|z| Complex::new(to_f64(z.re), to_f64(z.im))),
    );
    let ah = a.adjoint();
    let gram = &a * &ah;
    let coef = gram.lu().solve(&(&a * &vc)).ok_or_else(|| Error::Invalid("dμ_ℂ is not surjective here".into()))?;
    let out = vc - ah * coef;
    let z = |k: usize| c(lit::<T>(out[k].re), lit::<T>(out[k].im));
    Ok(TangentHP {
        xdot: (0..n).map(|i| Vec2([z(4 * i), z(4 * i + 1)])).collect(),
        ydot: (0..n).map(|i| Covec2([z(4 * i + 2), z(4 * i + 3)])).collect(),
    })
}

/// Σ_i |ẋ_i|² + |ẏ_i|².
pub fn hp_norm_sq<T: Real>(v: &TangentHP<T>) -> T {
    v.xdot.iter().map(Vec2::norm_sqr).chain(v.ydot.iter().map(Covec2::norm_sqr)).fold(T::zero(), |a, b| a + b)
}

/// Real inner product Re Σ (ẋ₁_i† ẋ₂_i + ẏ₂_i ẏ₁_i†) induced by the flat metric.
pub fn hp_inner<T: Real>(v: &TangentHP<T>, w: &TangentHP<T>) -> T {
    let mut s = T::zero();
    for i in 0..v.n() {
        s = s + v.xdot[i].dagger().apply(&w.xdot[i]).re + w.ydot[i].apply(&v.ydot[i].dagger()).re;
    }
    s
}

/// Liouville pairing Σ_i (ẏ_{1,i}·ẋ_{2,i} − ẏ_{2,i}·ẋ_{1,i}).
pub fn hp_symplectic<T: Real>(v1: &TangentHP<T>, v2: &TangentHP<T>) -> C<T> {
    (0..v1.n()).fold(re(T::zero()), |a, i| a + v1.ydot[i].apply(&v2.xdot[i]) - v2.ydot[i].apply(&v1.xdot[i]))
}

/// ν̇_flags,i = −(ẋ_i x_i†)^⊥/|x_i|² − (x_i†ẋ_i)(x_i x_i†)^⊥/|x_i|⁴, so −ν̇ x_i = ẋ_i.
pub fn nu_flags<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>, i: usize) -> Result<Mat2<T>> {
    let x = rep.x[i];
    let n2 = x.norm_sqr();
    if n2 == T::zero() {
        return Err(Error::ZeroVector(i));
    }
    let xd = v.xdot[i];
    let a = traceless(&xd.outer(&x.dagger())).scale_re(-n2.recip());
    let b = traceless(&x.outer(&x.dagger())).scale(x.dagger().apply(&xd) * re(-(n2 * n2).recip()));
    Ok(a + b)
}
