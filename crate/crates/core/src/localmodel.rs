//! Exact single-puncture solution of the R-rescaled Hitchin equations on the
//! punctured unit disk, its first variation, and the closed-form disk integrals.
//!
//! Conventions: dz̄∧dz = 2i dx∧dy, ∂̄∂f = ¼Δf dz̄∧dz, boundary circles are oriented
//! counterclockwise so ∮ dz̄/z̄ = −2πi. Every i-valued quantity is reported as its
//! real coefficient of i.
//!
//! Finite differences are taken in log-polar coordinates (u, θ) = (log r, arg z),
//! where Δ = r⁻²(∂_u² + ∂_θ²); `step` is the increment in u and θ.

use crate::error::{Error, Result};
use crate::mat2::{adjoint_wrt, aligning_unitary, c, re, traceless, Covec2, Herm2, Mat2, Vec2, C};
use crate::quadrature::Rule1;
use crate::scalar::{lit, to_f64, Real, Tol};

/// One branch (x, y) with yx = 0 and |x|² − |y|² = 2β, at scale R.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalData<T> {
    pub x: Vec2<T>,
    pub y: Covec2<T>,
    pub beta: T,
    pub r: T,
}

/// A deformation (ẋ, ẏ) with ẏx + yẋ = 0 and x†ẋ − ẏy† = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalTangent<T> {
    pub xdot: Vec2<T>,
    pub ydot: Covec2<T>,
}

/// Unitary U with Ux = (|x|, 0)ᵀ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignedFrame<T> {
    pub u: Mat2<T>,
}

impl<T: Real> LocalData<T> {
    pub fn new(x: Vec2<T>, y: Covec2<T>, beta: T, r: T, tol: &Tol<T>) -> Result<Self> {
        let scale = T::one() + x.norm_sqr() + y.norm_sqr();
        if y.apply(&x).norm() > tol.eq * scale {
            return Err(Error::Invalid("local data needs yx = 0".into()));
        }
        if (x.norm_sqr() - y.norm_sqr() - beta - beta).abs() > tol.eq * scale {
            return Err(Error::Invalid("local data needs |x|² − |y|² = 2β".into()));
        }
        if !(beta > T::zero()) || !(r >= T::zero()) {
            return Err(Error::Invalid("local data needs β > 0 and R ≥ 0".into()));
        }
        Ok(LocalData { x, y, beta, r })
    }

    /// Takes β = (|x|² − |y|²)/2 from the branch itself.
    pub fn from_branch(x: Vec2<T>, y: Covec2<T>, r: T) -> Self {
        let beta = (x.norm_sqr() - y.norm_sqr()) * lit(0.5);
        LocalData { x, y, beta, r }
    }

    pub fn a(&self) -> T {
        self.x.norm_sqr()
    }

    pub fn b(&self) -> T {
        self.y.norm_sqr()
    }

    /// Exponent 4Rβ of s = r^{4Rβ}.
    pub fn kappa(&self) -> T {
        lit::<T>(4.0) * self.r * self.beta
    }

    pub fn frame(&self) -> Result<AlignedFrame<T>> {
        aligning_unitary(&self.x).map(|u| AlignedFrame { u }).ok_or(Error::ZeroVector(0))
    }

    /// Same data in the aligned frame: x = (|x|, 0)ᵀ, y = (0, y₂).
    pub fn aligned(&self) -> Result<(AlignedFrame<T>, Self)> {
        let f = self.frame()?;
        let mut x = f.u.mul_vec(&self.x);
        x.0[1] = re(T::zero());
        let mut y = f.u.dagger().left_mul(&self.y);
        y.0[0] = re(T::zero());
        Ok((f, LocalData { x, y, ..*self }))
    }

    fn s(&self, r: T) -> T {
        (self.kappa() * r.ln()).exp()
    }

    fn check(&self, r: T) -> Result<T> {
        let s = self.s(r);
        if !(r > T::zero()) || !(self.a() - self.b() * s > T::zero()) {
            return Err(Error::OutOfDomain(to_f64(r)));
        }
        Ok(s)
    }
}

impl<T: Real> LocalTangent<T> {
    pub fn new(d: &LocalData<T>, xdot: Vec2<T>, ydot: Covec2<T>, tol: &Tol<T>) -> Result<Self> {
        let t = LocalTangent { xdot, ydot };
        let scale = (T::one() + d.a() + d.b()) * (T::one() + xdot.norm() + ydot.norm());
        let (lin, orth) = t.constraints(d);
        if lin.norm() > tol.eq * scale || orth.norm() > tol.eq * scale {
            return Err(Error::Invalid("local tangent violates the unitary lift equations".into()));
        }
        Ok(t)
    }

    /// (ẏx + yẋ, x†ẋ − ẏy†).
    pub fn constraints(&self, d: &LocalData<T>) -> (C<T>, C<T>) {
        (
            self.ydot.apply(&d.x) + d.y.apply(&self.xdot),
            d.x.dagger().apply(&self.xdot) - self.ydot.apply(&d.y.dagger()),
        )
    }

    pub fn in_frame(&self, f: &AlignedFrame<T>) -> Self {
        LocalTangent { xdot: f.u.mul_vec(&self.xdot), ydot: f.u.dagger().left_mul(&self.ydot) }
    }

    pub fn zero() -> Self {
        LocalTangent { xdot: Vec2::zero(), ydot: Covec2::zero() }
    }
}

/// λ_loc,R(r) = 2β r^{2Rβ} / (|x|² − |y|² r^{4Rβ}).
pub fn lambda_loc<T: Real>(d: &LocalData<T>, r: T) -> Result<T> {
    let s = d.check(r)?;
    Ok((d.beta + d.beta) * s.sqrt() / (d.a() - d.b() * s))
}

pub fn log_lambda<T: Real>(d: &LocalData<T>, r: T) -> Result<T> {
    let s = d.check(r)?;
    Ok((d.beta + d.beta).ln() + d.kappa() * lit::<T>(0.5) * r.ln() - (d.a() - d.b() * s).ln())
}

/// r·∂_r log λ = 2Rβ(|x|² + |y|²s)/(|x|² − |y|²s). Then ∂_z log λ = (this)/(2z).
pub fn dlog_lambda_du<T: Real>(d: &LocalData<T>, r: T) -> Result<T> {
    let s = d.check(r)?;
    Ok(d.kappa() * lit::<T>(0.5) * (d.a() + d.b() * s) / (d.a() - d.b() * s))
}

/// N = 2(xx†)^⊥/|x|².
pub fn n_matrix<T: Real>(x: &Vec2<T>) -> Result<Mat2<T>> {
    let n2 = x.norm_sqr();
    if n2 == T::zero() {
        return Err(Error::ZeroVector(0));
    }
    Ok(traceless(&x.outer(&x.dagger())).scale_re(lit::<T>(2.0) / n2))
}

/// exp(N log λ) = cosh(log λ)·Id + sinh(log λ)·N since N² = Id.
pub fn h_loc_unimodular<T: Real>(d: &LocalData<T>, r: T) -> Result<Herm2<T>> {
    let l = log_lambda(d, r)?;
    let n = n_matrix(&d.x)?;
    Ok(Herm2::symmetrized(&(Mat2::identity().scale_re(l.cosh()) + n.scale_re(l.sinh()))))
}

/// √hdet · exp(N log λ).
pub fn h_loc<T: Real>(d: &LocalData<T>, z: C<T>, hdet: T) -> Result<Herm2<T>> {
    let h = h_loc_unimodular(d, z.norm())?;
    Ok(Herm2::symmetrized(&h.mat().scale_re(hdet.sqrt())))
}

/// Entries (ν̇₁₁, ν̇₂₁) in the aligned frame. Both inputs must already be aligned.
pub fn nu_entries<T: Real>(da: &LocalData<T>, ta: &LocalTangent<T>, r: T) -> Result<(C<T>, C<T>)> {
    let s = da.check(r)?;
    let l = lambda_loc(da, r)?;
    let x1 = da.x.0[0];
    let n = ta.ydot.0[1] * da.y.0[1].conj() * re((s - T::one()) / (da.a() - da.b() * s));
    let m = ta.xdot.0[1] / x1 * re(l * l - T::one());
    Ok((n, m))
}

/// Radial derivatives (∂_r ν̇₁₁, ∂_r ν̇₂₁) in the aligned frame.
pub fn nu_entries_dr<T: Real>(da: &LocalData<T>, ta: &LocalTangent<T>, r: T) -> Result<(C<T>, C<T>)> {
    let s = da.check(r)?;
    let l2 = lambda_loc(da, r)?.powi(2);
    let (a, b) = (da.a(), da.b());
    let dn = ta.ydot.0[1] * da.y.0[1].conj() * re((a - b) * da.kappa() * s / (r * (a - b * s).powi(2)));
    let dlog = dlog_lambda_du(da, r)? / r;
    let dm = ta.xdot.0[1] / da.x.0[0] * re(lit::<T>(2.0) * l2 * dlog);
    Ok((dn, dm))
}

fn lower_triangular<T: Real>(n: C<T>, m: C<T>) -> Mat2<T> {
    Mat2::new(n, re(T::zero()), m, -n)
}

/// ν̇_loc,R at z, in the original frame.
pub fn nu_loc<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, z: C<T>) -> Result<Mat2<T>> {
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let (n, m) = nu_entries(&da, &ta, z.norm())?;
    Ok(f.u.dagger() * lower_triangular(n, m) * f.u)
}

// Point z·exp(du + i dθ) of the log-polar stencil.
fn shifted<T: Real>(z: C<T>, du: T, dth: T) -> C<T> {
    z * c(du, dth).exp()
}

/// |¼Δ log λ − R²λ²|x|²|y|²/r²| with a five-point log-polar Laplacian.
/// NaN if the stencil leaves the domain.
pub fn hitchin_residual_local<T: Real>(d: &LocalData<T>, z: C<T>, step: T) -> T {
    let f = |w: C<T>| log_lambda(d, w.norm()).unwrap_or(T::nan());
    let h = step;
    let lap = (f(shifted(z, h, T::zero())) + f(shifted(z, -h, T::zero())) + f(shifted(z, T::zero(), h))
        + f(shifted(z, T::zero(), -h))
        - f(z) * lit(4.0))
        / (h * h);
    let r = z.norm();
    let lam = lambda_loc(d, r).unwrap_or(T::nan());
    let rhs = d.r * d.r * lam * lam * d.a() * d.b() / (r * r);
    (lap / (lit::<T>(4.0) * r * r) - rhs).abs()
}

struct Stencil<T> {
    dz: Mat2<T>,
    dzbar: Mat2<T>,
    lap_quarter: Mat2<T>,
}

// ∂_z, ∂_z̄ and ∂_z∂_z̄ = ¼Δ of a matrix field by central log-polar differences.
fn stencil<T: Real>(z: C<T>, h: T, f: impl Fn(C<T>) -> Mat2<T>) -> Stencil<T> {
    let zero = T::zero();
    let (up, um, tp, tm, c0) =
        (f(shifted(z, h, zero)), f(shifted(z, -h, zero)), f(shifted(z, zero, h)), f(shifted(z, zero, -h)), f(z));
    let du = (up - um).scale_re((h + h).recip());
    let dt = (tp - tm).scale_re((h + h).recip());
    let lap = (up + um + tp + tm - c0.scale_re(lit(4.0))).scale_re((h * h).recip());
    let r = z.norm();
    let e = z / re(r);
    let i = c(zero, T::one());
    let half_r = re((r + r).recip());
    Stencil {
        dz: (du - dt.scale(i)).scale(e.conj() * half_r),
        dzbar: (du + dt.scale(i)).scale(e * half_r),
        lap_quarter: lap.scale_re((lit::<T>(4.0) * r * r).recip()),
    }
}

/// Relative size of R⁻¹(∂_z∂_z̄ν̇ + [h⁻¹∂_z h, ∂_z̄ν̇]) + R[φ^{†h}, φ̇ + [ν̇, φ]],
/// the dz̄∧dz coefficient of −R⁻¹∂^h∂̄ν̇ + R[φ^{†h}, φ̇ + [ν̇, φ]], measured against
/// the sum of the norms of its two terms. Zero when both terms vanish.
pub fn coulomb_residual_local<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, z: C<T>, step: T) -> T {
    let Ok((f, da)) = d.aligned() else { return T::nan() };
    let ta = t.in_frame(&f);
    let nu = |w: C<T>| nu_entries(&da, &ta, w.norm()).map(|(n, m)| lower_triangular(n, m)).unwrap_or(Mat2::zero());
    let hm = |w: C<T>| {
        let l = lambda_loc(&da, w.norm()).unwrap_or(T::nan());
        Mat2::diag(re(l), re(l.recip()))
    };
    let sn = stencil(z, step, nu);
    let sh = stencil(z, step, hm);
    let h0 = hm(z);
    let hinv = h0.inverse().unwrap_or(Mat2::zero());
    let conn = hinv * sh.dz;
    let term1 = (sn.lap_quarter + conn.commutator(&sn.dzbar)).scale_re(da.r.recip());
    let zi = z.inv();
    let phi = da.x.outer(&da.y).scale(zi);
    let phidot = (ta.xdot.outer(&da.y) + da.x.outer(&ta.ydot)).scale(zi);
    let cap = phidot + nu(z).commutator(&phi);
    let Ok(phi_dag) = adjoint_wrt(&Herm2::symmetrized(&h0), &phi) else { return T::nan() };
    let term2 = phi_dag.commutator(&cap).scale_re(da.r);
    let denom = term1.norm() + term2.norm();
    if denom == T::zero() {
        return T::zero();
    }
    (term1 + term2).norm() / denom
}

// Sample radii for the metric variation check.
const VARIATION_RADII: [f64; 3] = [0.2, 0.5, 0.8];

/// max_r ‖exp(tν̇†) h(0) exp(tν̇) − h(t)‖_F over a few radii, with h(t) the local
/// model metric of (x + tẋ, y + tẏ) at fixed β. Pass `with_nu = false` to drop
/// the gauge correction.
pub fn metric_variation_residual<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, tstep: T, with_nu: bool) -> Result<T> {
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let mut dt = da;
    dt.x = da.x + ta.xdot.scale(re(tstep));
    dt.y = da.y + ta.ydot.scale(re(tstep));
    let mut worst = T::zero();
    for &r in &VARIATION_RADII {
        let r = lit::<T>(r);
        let h0 = *h_loc_unimodular(&da, r)?.mat();
        let ht = *h_loc_unimodular(&dt, r)?.mat();
        let g = if with_nu {
            let (n, m) = nu_entries(&da, &ta, r)?;
            lower_triangular(n, m).scale_re(tstep).exp()
        } else {
            Mat2::identity()
        };
        worst = worst.max((g.dagger() * h0 * g - ht).norm());
    }
    Ok(worst)
}

pub fn metric_variation_check<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, tstep: T) -> Result<T> {
    metric_variation_residual(d, t, tstep, true)
}

/// Polar grid for the disk integrals: Gauss–Legendre panels in u = log r on
/// [log r_min, log δ] and a periodic trapezoid rule in θ. Below r_min the closed
/// forms supply the remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskGrid {
    pub r_min: f64,
    pub panels: usize,
    pub order: usize,
    pub angular: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { r_min: 1e-8, panels: 64, order: 8, angular: 64 }
    }
}

impl DiskGrid {
    pub fn radial_rule<T: Real>(&self, delta: T) -> Rule1<T> {
        Rule1::gauss_legendre(lit::<T>(self.r_min).ln(), delta.ln(), self.panels, self.order)
    }
}

/// ∫₀^δ Rλ² dr/r = βs_δ/(|x|²(|x|² − |y|²s_δ)).
pub fn radial_i<T: Real>(d: &LocalData<T>, delta: T) -> Result<T> {
    let s = d.check(delta)?;
    Ok(d.beta * s / (d.a() * (d.a() - d.b() * s)))
}

/// ∫₀^δ Rλ²(s − 1)/(|x|² − |y|²s) dr/r = ¼[(s_δ − 1)²/(|x|² − |y|²s_δ)² − 1/|x|⁴].
pub fn radial_j<T: Real>(d: &LocalData<T>, delta: T) -> Result<T> {
    let s = d.check(delta)?;
    let q = (s - T::one()) / (d.a() - d.b() * s);
    Ok((q * q - (d.a() * d.a()).recip()) * lit(0.25))
}

/// R⁻¹∫_{B_ρ} ∂̄∂ log λ in closed form: 2πβ[(|x|² + |y|²s)/(|x|² − |y|²s) − 1].
pub fn disk_curvature_closed<T: Real>(d: &LocalData<T>, rho: T) -> Result<T> {
    let s = d.check(rho)?;
    Ok(T::TAU() * d.beta * ((d.a() + d.b() * s) / (d.a() - d.b() * s) - T::one()))
}

/// (closed form, polar quadrature) of R⁻¹∫_{B_δ} ∂̄∂ log λ.
pub fn disk_curvature_integral<T: Real>(d: &LocalData<T>, delta: T) -> Result<(T, T)> {
    disk_curvature_integral_with(d, delta, &DiskGrid::default())
}

pub fn disk_curvature_integral_with<T: Real>(d: &LocalData<T>, delta: T, grid: &DiskGrid) -> Result<(T, T)> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::OutOfDomain(to_f64(delta)));
    }
    let closed = disk_curvature_closed(d, delta)?;
    if d.r == T::zero() {
        return Ok((closed, T::zero()));
    }
    let (a, b, k) = (d.a(), d.b(), d.kappa());
    // R⁻¹ · 2 · ¼Δ log λ · r² = R⁻¹ ½ κ² ab s/(a − bs)² per du dθ
    let radial = grid.radial_rule(delta);
    let angular = Rule1::<T>::periodic(grid.angular);
    let body = radial.integrate(|u| {
        let s = (k * u).exp();
        let g = lit::<T>(0.5) * k * k * a * b * s / (a - b * s).powi(2) / d.r;
        angular.integrate(|_| g)
    });
    let tail = disk_curvature_closed(d, lit(grid.r_min))?;
    Ok((closed, body + tail))
}

/// R → 0 limit of the boundary term, 2π(|ẋ₂|² − |ẏ₁|²) in the aligned frame.
pub fn boundary_pairing<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>) -> Result<T> {
    let f = d.frame()?;
    let ta = t.in_frame(&f);
    Ok(T::TAU() * (ta.xdot.0[1].norm_sqr() - ta.ydot.0[0].norm_sqr()))
}

/// Boundary term R⁻¹∮_{|z|=ρ}⟨ν̇, ∂̄ν̇⟩_h at finite ρ. As ρ → 0 it tends to
/// 4πβ|ẋ₂|²/|x|², which equals [`boundary_pairing`] for every R.
pub fn boundary_pairing_at<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, rho: T) -> Result<T> {
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let s = da.check(rho)?;
    let l2 = lambda_loc(&da, rho)?.powi(2);
    let (a, b) = (da.a(), da.b());
    let (n, m) = nu_entries(&da, &ta, rho)?;
    let dn = ta.ydot.0[1] * da.y.0[1].conj() * re(l2);
    let dm = ta.xdot.0[1] / da.x.0[0] * re(lit::<T>(2.0) * da.beta * (a + b * s) / (a - b * s));
    let inner = (n.conj() * dn).re * lit(2.0) + (m.conj() * dm).re;
    Ok(-T::TAU() * inner)
}

/// Bulk pairing i-coefficient over B_δ in closed form at finite R:
/// 8π|x|²|ẏ₁|²I + 4π|φ̇₁₂|²I + 8π|y|² Re(conj(φ̇₁₂) x₁ẏ₂) J.
pub fn bulk_closed_at<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, delta: T) -> Result<T> {
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let i = radial_i(&da, delta)?;
    let j = radial_j(&da, delta)?;
    let (x1, y2) = (da.x.0[0], da.y.0[1]);
    let p12 = ta.xdot.0[0] * y2 + x1 * ta.ydot.0[1];
    let pi = T::PI();
    let cross = (p12.conj() * x1 * ta.ydot.0[1]).re;
    Ok(lit::<T>(8.0) * pi * da.a() * ta.ydot.0[0].norm_sqr() * i
        + lit::<T>(4.0) * pi * p12.norm_sqr() * i
        + lit::<T>(8.0) * pi * da.b() * cross * j)
}

/// R → 0 limit of [`bulk_closed_at`], from I → 1/(2|x|²) and J → −1/(4|x|⁴).
pub fn bulk_closed_limit<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>) -> Result<T> {
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let (x1, y2) = (da.x.0[0], da.y.0[1]);
    let a = da.a();
    let p12 = ta.xdot.0[0] * y2 + x1 * ta.ydot.0[1];
    let cross = (p12.conj() * x1 * ta.ydot.0[1]).re;
    let pi = T::PI();
    Ok(lit::<T>(4.0) * pi * ta.ydot.0[0].norm_sqr() + lit::<T>(2.0) * pi * p12.norm_sqr() / a
        - lit::<T>(2.0) * pi * da.b() * cross / (a * a))
}

/// R-rescaled bulk density at z in the aligned frame: 2R Re tr(φ̇^{†h}(φ̇ + [ν̇, φ])),
/// the i-coefficient per unit area.
pub(crate) fn bulk_density_aligned<T: Real>(da: &LocalData<T>, ta: &LocalTangent<T>, z: C<T>) -> Result<T> {
    let r = z.norm();
    let l = lambda_loc(da, r)?;
    let h = Herm2::diag(l, l.recip());
    let (n, m) = nu_entries(da, ta, r)?;
    let zi = z.inv();
    let phi = da.x.outer(&da.y).scale(zi);
    let phidot = (ta.xdot.outer(&da.y) + da.x.outer(&ta.ydot)).scale(zi);
    let cap = phidot + lower_triangular(n, m).commutator(&phi);
    let pd = adjoint_wrt(&h, &phidot)?;
    Ok(lit::<T>(2.0) * da.r * (pd * cap).trace().re)
}

/// (R → 0 closed limit, polar quadrature at the given R) of the bulk pairing over B_δ.
pub fn bulk_pairing<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, delta: T) -> Result<(T, T)> {
    bulk_pairing_with(d, t, delta, &DiskGrid::default())
}

pub fn bulk_pairing_with<T: Real>(d: &LocalData<T>, t: &LocalTangent<T>, delta: T, grid: &DiskGrid) -> Result<(T, T)> {
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::OutOfDomain(to_f64(delta)));
    }
    let limit = bulk_closed_limit(d, t)?;
    let (f, da) = d.aligned()?;
    let ta = t.in_frame(&f);
    let radial = grid.radial_rule(delta);
    let angular = Rule1::<T>::periodic(grid.angular);
    // a − bs ≥ a − b > 0 on the closed unit disk, so the density never fails there
    let body = radial.integrate(|u| {
        let r = u.exp();
        angular.integrate(|th| {
            let z = c(r * th.cos(), r * th.sin());
            bulk_density_aligned(&da, &ta, z).unwrap_or(T::nan()) * r * r
        })
    });
    let tail = bulk_closed_at(d, t, lit(grid.r_min))?;
    Ok((limit, body + tail))
}

/// (|log λ − 2Rβ̃ log r|, |∂-gap|, |∂̄-gap|) with β̃ = ½(|x|² + |y|²); the derivative
/// gaps compare dz and dz̄ coefficients of d log λ and of 2Rβ̃ d log r.
pub fn glue_gap<T: Real>(d: &LocalData<T>, r: T) -> Result<(T, T, T)> {
    let bt = (d.a() + d.b()) * lit(0.5);
    let g0 = (log_lambda(d, r)? - lit::<T>(2.0) * d.r * bt * r.ln()).abs();
    let g1 = (dlog_lambda_du(d, r)? * lit(0.5) - d.r * bt).abs() / r;
    Ok((g0, g1, g1))
}

/// Largest of the three gaps over `m` equispaced radii in [lo, hi].
pub fn glue_gap_sup<T: Real>(d: &LocalData<T>, lo: T, hi: T, m: usize) -> Result<T> {
    let mut worst = T::zero();
    for k in 0..m {
        let r = lo + (hi - lo) * lit(k as f64 / (m.max(2) - 1) as f64);
        let (a, b, c) = glue_gap(d, r)?;
        worst = worst.max(a).max(b).max(c);
    }
    Ok(worst)
}
