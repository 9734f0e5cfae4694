//! Representations of the doubled star quiver: moment maps, β-stability,
//! Kempf–Ness unitarization and the polygon picture in ℝ³.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hp_tangent::infinitesimal_action;
use crate::mat2::{c, from_su2_coords, re, su2_coords, traceless, Covec2, Mat2, Vec2, C};
use crate::scalar::{lit, to_f64, Real, Tol};

/// Index subsets of `[n]` are bitmasks: bit `i` set means branch `i` belongs to `I`.
pub type Subset = u32;

pub fn subset_indices(s: Subset, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| s >> i & 1 == 1).collect()
}

pub fn subset_from(idx: &[usize]) -> Subset {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

/// A point (x, y) with x_i ∈ Hom(ℂ, ℂ²) and y_i ∈ Hom(ℂ², ℂ).
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverRep<T> {
    pub x: Vec<Vec2<T>>,
    pub y: Vec<Covec2<T>>,
}

impl<T: Real> QuiverRep<T> {
    pub fn new(x: Vec<Vec2<T>>, y: Vec<Covec2<T>>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() || x.len() > 31 {
            return Err(Error::Invalid(format!("branch counts x: {}, y: {}", x.len(), y.len())));
        }
        if !x.iter().all(Vec2::is_finite) || !y.iter().all(Covec2::is_finite) {
            return Err(Error::Invalid("non-finite entry".into()));
        }
        Ok(QuiverRep { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// √(Σ|x_i|² + |y_i|²), the scale used for relative tolerances.
    pub fn scale(&self) -> T {
        let s = self.x.iter().map(Vec2::norm_sqr).chain(self.y.iter().map(Covec2::norm_sqr));
        s.fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn cast<U: Real>(&self) -> QuiverRep<U> {
        let cv = |z: &C<T>| c(lit::<U>(to_f64(z.re)), lit::<U>(to_f64(z.im)));
        QuiverRep {
            x: self.x.iter().map(|v| Vec2([cv(&v.0[0]), cv(&v.0[1])])).collect(),
            y: self.y.iter().map(|v| Covec2([cv(&v.0[0]), cv(&v.0[1])])).collect(),
        }
    }
}

/// Positive weights with every wall sum W_I bounded away from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaWeights<T> {
    beta: Vec<T>,
}

impl<T: Real> BetaWeights<T> {
    pub fn new(beta: Vec<T>, tol: &Tol<T>) -> Result<Self> {
        if beta.is_empty() || beta.len() > 31 || beta.iter().any(|b| !(*b > T::zero()) || !b.is_finite()) {
            return Err(Error::Invalid("weights must be positive and finite".into()));
        }
        let w = BetaWeights { beta };
        let n = w.beta.len();
        let worst = (0..1u32 << n).map(|s| w_sum(s, &w).abs()).fold(T::infinity(), T::min);
        if worst < tol.wall {
            return Err(Error::WallWeights(to_f64(worst)));
        }
        Ok(w)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.beta
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    pub fn total(&self) -> T {
        self.beta.iter().fold(T::zero(), |a, &b| a + b)
    }
}

/// W_I(β) = Σ_{i∈I} β_i − Σ_{i∉I} β_i.
pub fn w_sum<T: Real>(s: Subset, beta: &BetaWeights<T>) -> T {
    w_sum_slice(s, &beta.beta)
}

pub fn w_sum_slice<T: Real>(s: Subset, v: &[T]) -> T {
    v.iter()
        .enumerate()
        .fold(T::zero(), |a, (i, &b)| if s >> i & 1 == 1 { a + b } else { a - b })
}

/// ℝ³ images of (x_i x_i†)^⊥ and (y_i† y_i)^⊥ in the basis σ_k/√2.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonView<T> {
    pub v: Vec<[T; 3]>,
    pub w: Vec<[T; 3]>,
}

/// Element (A, t) of SL(2,ℂ) × (ℂ^×)ⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElt<T> {
    pub a: Mat2<T>,
    pub t: Vec<C<T>>,
}

impl<T: Real> GroupElt<T> {
    pub fn new(a: Mat2<T>, t: Vec<C<T>>) -> Result<Self> {
        if (a.det() - re(T::one())).norm() >= lit(1e-12) {
            return Err(Error::SingularGroupElt);
        }
        Ok(GroupElt { a, t })
    }

    pub fn identity(n: usize) -> Self {
        GroupElt { a: Mat2::identity(), t: vec![re(T::one()); n] }
    }
}

/// (Σ_i (x_i y_i)^⊥, (y_i x_i)_i).
pub fn mu_complex<T: Real>(rep: &QuiverRep<T>) -> (Mat2<T>, Vec<C<T>>) {
    let m = rep.x.iter().zip(&rep.y).fold(Mat2::zero(), |a, (x, y)| a + traceless(&x.outer(y)));
    let s = rep.x.iter().zip(&rep.y).map(|(x, y)| y.apply(x)).collect();
    (m, s)
}

/// ((i/2) Σ_i (x_i x_i† − y_i† y_i)^⊥, ((|x_i|² − |y_i|²)/2)_i).
pub fn mu_real<T: Real>(rep: &QuiverRep<T>) -> (Mat2<T>, Vec<T>) {
    let h = su2_hermitian_part(rep);
    let s = rep.x.iter().zip(&rep.y).map(|(x, y)| (x.norm_sqr() - y.norm_sqr()) * lit(0.5)).collect();
    (h.scale(c(T::zero(), T::one())), s)
}

// ½ Σ (x x† − y† y)^⊥, the hermitian matrix with μ_SU(2) = i·(this).
fn su2_hermitian_part<T: Real>(rep: &QuiverRep<T>) -> Mat2<T> {
    let m = rep.x.iter().zip(&rep.y).fold(Mat2::zero(), |a, (x, y)| {
        a + x.outer(&x.dagger()) - y.dagger().outer(y)
    });
    traceless(&m).scale_re(lit(0.5))
}

/// Size of μ_ℂ relative to the scale of the representation.
pub fn mu_complex_residual<T: Real>(rep: &QuiverRep<T>) -> T {
    let (m, s) = mu_complex(rep);
    let r = s.iter().fold(m.norm(), |a, z| a.max(z.norm()));
    r / T::one().max(rep.scale() * rep.scale())
}

fn require_hyperpolygon<T: Real>(rep: &QuiverRep<T>, tol: &Tol<T>) -> Result<()> {
    let r = mu_complex_residual(rep);
    if r > tol.prop {
        return Err(Error::NotAHyperpolygon(to_f64(r)));
    }
    Ok(())
}

fn proportional<T: Real>(a: &Vec2<T>, b: &Vec2<T>, tol: T) -> bool {
    a.cross(b).norm() <= tol * a.norm() * b.norm()
}

/// Whether {x_i : i ∈ s} are pairwise proportional.
pub fn is_straight<T: Real>(rep: &QuiverRep<T>, s: Subset, tol: T) -> bool {
    let idx = subset_indices(s, rep.n());
    idx.iter().enumerate().all(|(k, &i)| idx[k + 1..].iter().all(|&j| proportional(&rep.x[i], &rep.x[j], tol)))
}

/// Maximal straight subsets. Every straight subset is contained in one of them.
pub fn straight_subsets<T: Real>(rep: &QuiverRep<T>, tol: T) -> Result<Vec<Subset>> {
    if let Some(i) = rep.x.iter().position(|x| x.norm_sqr() == T::zero()) {
        return Err(Error::ZeroVector(i));
    }
    let n = rep.n();
    let mut seen: Subset = 0;
    let mut out = Vec::new();
    for i in 0..n {
        if seen >> i & 1 == 1 {
            continue;
        }
        let class = (i..n).filter(|&j| proportional(&rep.x[i], &rep.x[j], tol)).fold(0, |m, j| m | 1 << j);
        seen |= class;
        out.push(class);
    }
    Ok(out)
}

fn support_of_y<T: Real>(rep: &QuiverRep<T>, tol: T) -> Subset {
    let floor = tol * T::one().max(rep.scale());
    (0..rep.n()).filter(|&i| rep.y[i].norm() > floor).fold(0, |m, i| m | 1 << i)
}

/// β-stability: all x_i ≠ 0 and no straight I with y vanishing off I and W_I(β) > 0.
///
/// W_I grows when I grows, so only maximal straight classes need checking.
pub fn is_stable<T: Real>(rep: &QuiverRep<T>, beta: &BetaWeights<T>, tol: &Tol<T>) -> Result<bool> {
    if rep.n() != beta.n() {
        return Err(Error::Invalid("rep and weights have different n".into()));
    }
    require_hyperpolygon(rep, tol)?;
    if rep.x.iter().any(|x| x.norm() <= tol.eq * T::one().max(rep.scale())) {
        return Ok(false);
    }
    let supp = support_of_y(rep, tol.prop);
    for class in straight_subsets(rep, tol.prop)? {
        if supp & !class != 0 {
            continue;
        }
        let w = w_sum(class, beta);
        if w.abs() < tol.wall {
            return Err(Error::WallWeights(to_f64(w)));
        }
        if w > T::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// g·(x, y) = (A x_i t_i⁻¹, t_i y_i A⁻¹).
pub fn act<T: Real>(g: &GroupElt<T>, rep: &QuiverRep<T>) -> Result<QuiverRep<T>> {
    if g.t.len() != rep.n() {
        return Err(Error::Invalid("group element has wrong n".into()));
    }
    if g.t.iter().any(|t| t.norm() == T::zero()) {
        return Err(Error::SingularGroupElt);
    }
    let ainv = g.a.inverse().ok_or(Error::SingularGroupElt)?;
    let x = rep.x.iter().zip(&g.t).map(|(x, t)| g.a.mul_vec(x).scale(t.inv())).collect();
    let y = rep.y.iter().zip(&g.t).map(|(y, t)| ainv.left_mul(y).scale(*t)).collect();
    Ok(QuiverRep { x, y })
}

pub fn polygon_view<T: Real>(rep: &QuiverRep<T>, tol: &Tol<T>) -> Result<PolygonView<T>> {
    require_hyperpolygon(rep, tol)?;
    let v = rep.x.iter().map(|x| su2_coords(&traceless(&x.outer(&x.dagger())))).collect();
    let w = rep.y.iter().map(|y| su2_coords(&traceless(&y.dagger().outer(y)))).collect();
    Ok(PolygonView { v, w })
}

#[derive(Clone, Copy, Debug)]
pub struct UnitarizeOpts {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for UnitarizeOpts {
    fn default() -> Self {
        UnitarizeOpts { tol: 1e-10, max_iter: 10_000 }
    }
}

// Residual μ_ℝ − (0, β) as a real vector: 3 su(2) coordinates then n scalars.
fn kn_residual(rep: &QuiverRep<f64>, beta: &[f64]) -> DVector<f64> {
    let h = su2_hermitian_part(rep);
    let v = su2_coords(&h);
    let (_, s) = mu_real(rep);
    DVector::from_iterator(3 + beta.len(), v.into_iter().chain(s.iter().zip(beta).map(|(a, b)| a - b)))
}

fn hermitian_direction(xi: &DVector<f64>, n: usize) -> (Mat2<f64>, Vec<C<f64>>) {
    let a = from_su2_coords([xi[0], xi[1], xi[2]]);
    let t = (0..n).map(|j| re(xi[3 + j])).collect();
    (a, t)
}

// Jacobian of the residual along the 3 + n hermitian directions.
fn kn_jacobian(rep: &QuiverRep<f64>) -> DMatrix<f64> {
    let n = rep.n();
    let mut jac = DMatrix::zeros(3 + n, 3 + n);
    for k in 0..3 + n {
        let mut e = DVector::zeros(3 + n);
        e[k] = 1.0;
        let (a, lam) = hermitian_direction(&e, n);
        let v = infinitesimal_action(&a, &lam, rep);
        let mut dh = Mat2::zero();
        for i in 0..n {
            let (x, y, xd, yd) = (rep.x[i], rep.y[i], v.xdot[i], v.ydot[i]);
            dh += xd.outer(&x.dagger()) + x.outer(&xd.dagger()) - yd.dagger().outer(&y) - y.dagger().outer(&yd);
        }
        let col = su2_coords(&traceless(&dh).scale_re(0.5));
        for (r, val) in col.into_iter().enumerate() {
            jac[(r, k)] = val;
        }
        for i in 0..n {
            let dx = (rep.x[i].dagger().apply(&v.xdot[i])).re;
            let dy = (v.ydot[i].apply(&rep.y[i].dagger())).re;
            jac[(3 + i, k)] = dx - dy;
        }
    }
    jac
}

fn exp_hermitian(xi: &DVector<f64>, n: usize) -> GroupElt<f64> {
    let (a, t) = hermitian_direction(xi, n);
    GroupElt { a: a.exp(), t: t.iter().map(|s| s.exp()).collect() }
}

/// Moves a stable hyperpolygon along G_ℂ until μ_ℝ = (0, β).
///
/// Newton steps in the 3 + n hermitian directions with Armijo backtracking on
/// ‖μ_ℝ − (0, β)‖². The linearization there is the Kempf–Ness Hessian, which is
/// nondegenerate at stable points. Arithmetic is done in f64.
pub fn unitarize<T: Real>(rep: &QuiverRep<T>, beta: &BetaWeights<T>, opts: &UnitarizeOpts, tol: &Tol<T>) -> Result<QuiverRep<T>> {
    if !is_stable(rep, beta, tol)? {
        return Err(Error::NotStable);
    }
    let n = rep.n();
    let b: Vec<f64> = beta.as_slice().iter().map(|&v| to_f64(v)).collect();
    let mut cur: QuiverRep<f64> = rep.cast();
    let mut f = kn_residual(&cur, &b);
    let mut iters = 0;
    while f.norm() >= opts.tol {
        if iters == opts.max_iter {
            return Err(Error::NoConvergence { iters, residual: f.norm() });
        }
        iters += 1;
        let jac = kn_jacobian(&cur);
        let dir = jac
            .clone()
            .lu()
            .solve(&(-&f))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .unwrap_or_else(|| -(jac.transpose() * &f));
        let f0 = f.norm_squared();
        let mut step = 1.0;
        loop {
            let trial = act(&exp_hermitian(&(&dir * step), n), &cur)?;
            let ft = kn_residual(&trial, &b);
            if ft.norm_squared() <= (1.0 - 1e-4 * step) * f0 || step < 1e-12 {
                cur = trial;
                f = ft;
                break;
            }
            step *= 0.5;
        }
    }
    if iters == 0 {
        return Ok(rep.clone());
    }
    Ok(cur.cast())
}
