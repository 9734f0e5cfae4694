//! Strongly parabolic Higgs bundles on the punctured sphere built from hyperpolygons,
//! their stability, Hitchin map and the fixed-point / Torelli bookkeeping for n = 4.

use crate::error::{Error, Result};
use crate::hp_tangent::TangentHP;
use crate::hyperpolygon::{is_stable, subset_indices, w_sum, w_sum_slice, BetaWeights, QuiverRep, Subset};
use crate::mat2::{c, re, Covec2, Mat2, Vec2, C};
use crate::scalar::{lit, to_f64, Real, Tol};

/// Parabolic weights α_i = ½ − Rβ_i.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaWeights<T> {
    pub alpha: Vec<T>,
    pub r: T,
    pub beta: BetaWeights<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicHiggs<T> {
    pub p: Vec<C<T>>,
    pub phi: Vec<Mat2<T>>,
    /// Unit flag vectors, first nonzero coordinate real and positive.
    pub flags: Vec<Vec2<T>>,
    pub alpha: AlphaWeights<T>,
}

impl<T: Real> ParabolicHiggs<T> {
    pub fn n(&self) -> usize {
        self.p.len()
    }
    pub fn r(&self) -> T {
        self.alpha.r
    }
}

/// Largest R with W_[n](α(R)) > (n−2)/2, namely 1/Σβ.
pub fn r_max<T: Real>(beta: &BetaWeights<T>) -> T {
    beta.total().recip()
}

pub fn alpha_of<T: Real>(beta: &BetaWeights<T>, r: T) -> Result<AlphaWeights<T>> {
    let rm = r_max(beta);
    if !(r > T::zero() && r < rm) {
        return Err(Error::ROutOfRange { r: to_f64(r), r_max: to_f64(rm) });
    }
    let alpha = beta.as_slice().iter().map(|&b| lit::<T>(0.5) - r * b).collect();
    Ok(AlphaWeights { alpha, r, beta: beta.clone() })
}

/// The n-th roots of unity.
pub fn default_punctures<T: Real>(n: usize) -> Vec<C<T>> {
    (0..n)
        .map(|k| {
            let t = T::TAU() * lit(k as f64) / lit(n as f64);
            c(t.cos(), t.sin())
        })
        .collect()
}

/// Unit representative of the line ⟨x⟩ whose first nonzero coordinate is real positive.
pub fn normalize_flag<T: Real>(x: &Vec2<T>) -> Option<Vec2<T>> {
    let n = x.norm();
    if n == T::zero() {
        return None;
    }
    let lead = if x.0[0].norm() > T::zero() { x.0[0] } else { x.0[1] };
    let phase = lead.conj() / re(lead.norm());
    Some(x.scale(phase * re(n.recip())))
}

fn check_punctures<T: Real>(p: &[C<T>]) -> Result<()> {
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if (p[i] - p[j]).norm() == T::zero() {
                return Err(Error::Invalid(format!("punctures {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// φ_i = x_i y_i, F_i = ⟨x_i⟩, α = α(R).
pub fn to_higgs<T: Real>(rep: &QuiverRep<T>, p: &[C<T>], beta: &BetaWeights<T>, r: T, tol: &Tol<T>) -> Result<ParabolicHiggs<T>> {
    if p.len() != rep.n() {
        return Err(Error::Invalid("wrong number of punctures".into()));
    }
    check_punctures(p)?;
    if !is_stable(rep, beta, tol)? {
        return Err(Error::NotStable);
    }
    let alpha = alpha_of(beta, r)?;
    let phi = rep.x.iter().zip(&rep.y).map(|(x, y)| x.outer(y)).collect();
    let flags = rep.x.iter().map(|x| normalize_flag(x).expect("stable reps have x_i ≠ 0")).collect();
    Ok(ParabolicHiggs { p: p.to_vec(), phi, flags, alpha })
}

fn is_nilpotent<T: Real>(m: &Mat2<T>, tol: T) -> bool {
    let s = T::one() + m.norm_sqr();
    m.trace().norm() <= tol * s.sqrt() && m.det().norm() <= tol * s
}

/// Factorizes each residue as φ_i = x_i y_i with x_i the flag vector.
pub fn from_higgs<T: Real>(h: &ParabolicHiggs<T>, tol: &Tol<T>) -> Result<QuiverRep<T>> {
    let mut x = Vec::with_capacity(h.n());
    let mut y = Vec::with_capacity(h.n());
    for (i, (phi, f)) in h.phi.iter().zip(&h.flags).enumerate() {
        let slack = tol.prop * (T::one() + phi.norm());
        if !is_nilpotent(phi, tol.prop) {
            return Err(Error::NotNilpotent(i));
        }
        let f2 = f.norm_sqr();
        if f2 == T::zero() {
            return Err(Error::FlagMismatch(i));
        }
        // φ = f y forces y = f†φ/|f|²
        let yi: Covec2<T> = phi.left_mul(&f.dagger()).scale(re(f2.recip()));
        if (*phi - f.outer(&yi)).norm() > slack || phi.mul_vec(f).norm() > slack * f.norm() {
            return Err(Error::FlagMismatch(i));
        }
        x.push(*f);
        y.push(yi);
    }
    QuiverRep::new(x, y)
}

/// Coefficient of dz of φ = Σ φ_i/(z − p_i) dz.
pub fn eval_phi<T: Real>(h: &ParabolicHiggs<T>, z: C<T>) -> Result<Mat2<T>> {
    eval_residues(&h.phi, &h.p, z)
}

pub(crate) fn eval_residues<T: Real>(phi: &[Mat2<T>], p: &[C<T>], z: C<T>) -> Result<Mat2<T>> {
    let mut acc = Mat2::zero();
    for (i, (m, pi)) in phi.iter().zip(p).enumerate() {
        let d = z - pi;
        if d.norm() == T::zero() {
            return Err(Error::AtPuncture(i));
        }
        acc += m.scale(d.inv());
    }
    Ok(acc)
}

/// φ̇ = Σ (ẋ_i y_i + x_i ẏ_i)/(z − p_i).
pub fn phi_dot<T: Real>(rep: &QuiverRep<T>, v: &TangentHP<T>, p: &[C<T>], z: C<T>) -> Result<Mat2<T>> {
    let res: Vec<Mat2<T>> = (0..rep.n()).map(|i| v.xdot[i].outer(&rep.y[i]) + rep.x[i].outer(&v.ydot[i])).collect();
    eval_residues(&res, p, z)
}

/// Whether no φ-invariant line subbundle has parabolic slope ≥ n/2.
///
/// Degree 0: an invariant constant line must lie in every ker φ_j; it only gains
/// weight 1 − α_i at punctures where it equals the flag, so the candidates are the
/// flag lines. Degree −d ≤ −1: the slope is at most −d + Σ(1 − α_i), which stays
/// below n/2 whenever Σα_i > (n − 2)/2; outside that range the test is inconclusive.
pub fn parabolic_stability<T: Real>(h: &ParabolicHiggs<T>, tol: &Tol<T>) -> Result<bool> {
    let n = h.n();
    let alpha = &h.alpha.alpha;
    let half_n = lit::<T>(n as f64 * 0.5);
    let total: T = alpha.iter().fold(T::zero(), |a, &b| a + b);
    if total <= lit::<T>((n as f64 - 2.0) * 0.5) {
        return Err(Error::ROutOfRange { r: to_f64(h.r()), r_max: to_f64(r_max(&h.alpha.beta)) });
    }
    for l in &h.flags {
        let invariant = h.phi.iter().all(|m| m.mul_vec(l).norm() <= tol.prop * (T::one() + m.norm()) * l.norm());
        if !invariant {
            continue;
        }
        let slope = h.flags.iter().zip(alpha).fold(T::zero(), |acc, (f, &a)| {
            let on = f.cross(l).norm() <= tol.prop * f.norm() * l.norm();
            acc + if on { T::one() - a } else { a }
        });
        if (slope - half_n).abs() < tol.wall {
            return Err(Error::WallWeights(to_f64(slope - half_n)));
        }
        if slope > half_n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// det φ · Π(z − p_i) at z, a polynomial in z of degree ≤ n − 4.
pub fn quadratic_differential_at<T: Real>(h: &ParabolicHiggs<T>, z: C<T>) -> Result<C<T>> {
    let d = eval_phi(h, z)?.det();
    Ok(h.p.iter().fold(d, |a, p| a * (z - p)))
}

/// Coefficients (constant term first) of det φ · Π(z − p_i), the quadratic
/// differential in H⁰(K²(D)) ≅ ℂ^{n−3}. Empty for n = 3.
///
/// Sampled at n − 3 equispaced points on a circle enclosing the punctures and
/// inverted by a discrete Fourier transform, which is exact for this degree.
pub fn det_phi<T: Real>(h: &ParabolicHiggs<T>) -> Result<Vec<C<T>>> {
    let n = h.n();
    if n < 3 {
        return Err(Error::UnsupportedN(n));
    }
    let m = n - 3;
    let rho = h.p.iter().fold(T::one(), |a, p| a.max(p.norm())) * lit(1.5) + lit(0.5);
    let samples: Vec<C<T>> = (0..m)
        .map(|k| {
            let t = T::TAU() * lit(k as f64) / lit(m as f64);
            quadratic_differential_at(h, c(rho * t.cos(), rho * t.sin()))
        })
        .collect::<Result<_>>()?;
    Ok((0..m)
        .map(|j| {
            let s = samples.iter().enumerate().fold(re(T::zero()), |a, (k, q)| {
                let t = -T::TAU() * lit((j * k) as f64) / lit(m as f64);
                a + *q * c(t.cos(), t.sin())
            });
            s / re(lit::<T>(m as f64) * rho.powi(j as i32))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotentComponent {
    CentralSphere,
    ExteriorPair(Vec<usize>),
    DistinguishedExterior,
}

/// Component of the n = 4 nilpotent cone containing `h`.
pub fn nilpotent_component<T: Real>(h: &ParabolicHiggs<T>, tol: &Tol<T>) -> Result<NilpotentComponent> {
    if h.n() != 4 {
        return Err(Error::UnsupportedN(h.n()));
    }
    let (inside, _) = biswas_membership(&h.alpha.alpha, tol)?;
    if !inside {
        return Err(Error::OutsideBiswas);
    }
    let scale = h.phi.iter().fold(T::one(), |a, m| a.max(m.norm_sqr()));
    let q = det_phi(h)?;
    if q[0].norm() > tol.prop * scale {
        return Err(Error::NotNilpotent(0));
    }
    let nz: Vec<usize> = (0..4).filter(|&i| h.phi[i].norm() > tol.prop * scale.sqrt()).collect();
    if nz.is_empty() {
        return Ok(NilpotentComponent::CentralSphere);
    }
    // residues are rank one with image F_i; proportional residues share flags
    let f0 = h.flags[nz[0]];
    let same = nz.iter().all(|&i| h.flags[i].cross(&f0).norm() <= tol.prop);
    Ok(if same { NilpotentComponent::ExteriorPair(nz) } else { NilpotentComponent::DistinguishedExterior })
}

/// The three |I| = 2 walls used for chamber signatures: {1,2}, {1,3}, {1,4}.
pub const PAIR_WALLS: [Subset; 3] = [0b0011, 0b0101, 0b1001];

/// Membership in 0 < W_I(α) < 1 for all |I| = 3, plus a 4-bit chamber signature:
/// bit k set iff W_{PAIR_WALLS[k]}(α) > 0, bit 3 set iff W_[4](α) > 1. Only the
/// |I| = 3 walls raise `WallWeights`.
pub fn biswas_membership<T: Real>(alpha: &[T], tol: &Tol<T>) -> Result<(bool, u8)> {
    if alpha.len() != 4 {
        return Err(Error::UnsupportedN(alpha.len()));
    }
    let near = |v: T| v.abs() < tol.wall;
    let mut inside = true;
    for drop in 0..4 {
        let w = w_sum_slice(0b1111 & !(1 << drop), alpha);
        if near(w) || near(w - T::one()) {
            return Err(Error::WallWeights(to_f64(w)));
        }
        inside &= w > T::zero() && w < T::one();
    }
    // signature bits on a pair wall or on W_[4] = 1 read as unset; only the
    // membership walls make the answer ambiguous
    let mut sig = 0u8;
    for (k, &s) in PAIR_WALLS.iter().enumerate() {
        sig |= u8::from(w_sum_slice(s, alpha) >= tol.wall) << k;
    }
    sig |= u8::from(w_sum_slice(0b1111, alpha) - T::one() >= tol.wall) << 3;
    Ok((inside, sig))
}

/// Whether the α(R) chamber matches the β chamber: W_I(α) = −R·W_I(β) on the pair
/// walls and W_[4](α) > 1 for R below R_max.
pub fn chamber_correspondence<T: Real>(beta: &BetaWeights<T>, r: T, tol: &Tol<T>) -> Result<bool> {
    let a = alpha_of(beta, r)?;
    let (_, sig) = biswas_membership(&a.alpha, tol)?;
    let expect = PAIR_WALLS.iter().enumerate().fold(0u8, |m, (k, &s)| m | u8::from(w_sum(s, beta) < T::zero()) << k);
    Ok(sig == expect | 1 << 3)
}

/// Support of y, straightness of I and Iᶜ: the U(1)-fixed point data of `rep`.
fn fixed_point_subset<T: Real>(rep: &QuiverRep<T>, tol: &Tol<T>) -> Result<Subset> {
    let n = rep.n();
    let floor = tol.prop * T::one().max(rep.scale());
    let supp: Subset = (0..n).filter(|&i| rep.y[i].norm() > floor).fold(0, |m, i| m | 1 << i);
    if supp == 0 {
        return Ok(0);
    }
    let straight = |s: Subset| {
        let idx = subset_indices(s, n);
        idx.windows(2).all(|w| rep.x[w[0]].cross(&rep.x[w[1]]).norm() <= tol.prop * rep.x[w[0]].norm() * rep.x[w[1]].norm())
    };
    let full = (1u32 << n) - 1;
    if straight(supp) && straight(full & !supp) {
        Ok(supp)
    } else {
        Err(Error::NotFixedPoint)
    }
}

/// Coefficient M of M_HP = iM at a U(1)-fixed point: 0 when y = 0, else −W_I(β)/2.
pub fn morse_hp<T: Real>(rep: &QuiverRep<T>, beta: &BetaWeights<T>, tol: &Tol<T>) -> Result<T> {
    let s = fixed_point_subset(rep, tol)?;
    Ok(if s == 0 { T::zero() } else { -w_sum(s, beta) * lit(0.5) })
}

/// ½Σ|y_i|², the hyperpolygon U(1) moment map at any point.
pub fn morse_hp_direct<T: Real>(rep: &QuiverRep<T>) -> T {
    rep.y.iter().fold(T::zero(), |a, y| a + y.norm_sqr()) * lit(0.5)
}

/// Coefficient M of M_R = iM at a fixed point of splitting type (I, deg L₁):
/// −πR⁻¹(deg L₁ + Σ_{I}(½ − α_i) + Σ_{Iᶜ}(α_i − ½)). The empty subset stands for
/// the φ ≡ 0 fixed points, where M = 0.
pub fn morse_hitchin_fixed<T: Real>(s: Subset, deg_l1: i32, alpha: &AlphaWeights<T>) -> T {
    if s == 0 {
        return T::zero();
    }
    let half = lit::<T>(0.5);
    let sum = alpha.alpha.iter().enumerate().fold(lit::<T>(deg_l1 as f64), |a, (i, &al)| {
        if s >> i & 1 == 1 {
            a + half - al
        } else {
            a + al - half
        }
    });
    -T::PI() / alpha.r * sum
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorelliRow<T> {
    pub subset: Subset,
    /// Periods of the three hyperpolygon Kähler forms over the sphere 𝒳_I.
    pub tau_hp: [T; 3],
    pub tau_hitchin: [T; 3],
    pub ratio: T,
}

/// Torelli numbers of the n = 4 spheres 𝒳_I for short pairs I.
///
/// The J₁ period is 2π times the moment map difference between the two fixed
/// points of the sphere (action-angle coordinates); the holomorphic spheres are
/// Lagrangian for the other two forms.
pub fn torelli_table<T: Real>(beta: &BetaWeights<T>, r: T) -> Result<Vec<TorelliRow<T>>> {
    if beta.n() != 4 {
        return Err(Error::UnsupportedN(beta.n()));
    }
    let alpha = alpha_of(beta, r)?;
    let mut rows = Vec::new();
    for s in 1u32..16 {
        if s.count_ones() != 2 || w_sum(s, beta) >= T::zero() {
            continue;
        }
        let hp = T::TAU() * (-w_sum(s, beta) * lit(0.5));
        let hit = T::TAU() * (morse_hitchin_fixed(s, 0, &alpha) - morse_hitchin_fixed(0, 0, &alpha));
        rows.push(TorelliRow { subset: s, tau_hp: [hp, T::zero(), T::zero()], tau_hitchin: [hit, T::zero(), T::zero()], ratio: hit / hp });
    }
    Ok(rows)
}
