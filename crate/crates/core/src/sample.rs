//! Seeded random instances for tests, sweeps and the command line.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

use crate::error::Result;
use crate::hp_tangent::{project_dmu_kernel, project_unitary, TangentHP};
use crate::hyperpolygon::{unitarize, w_sum_slice, BetaWeights, QuiverRep, UnitarizeOpts};
use crate::localmodel::{LocalData, LocalTangent};
use crate::mat2::{c, re, Covec2, Mat2, Vec2, C};
use crate::scalar::Tol;

pub fn complex<R: Rng>(rng: &mut R) -> C<f64> {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vec2<R: Rng>(rng: &mut R) -> Vec2<f64> {
    Vec2([complex(rng), complex(rng)])
}

pub fn covec2<R: Rng>(rng: &mut R) -> Covec2<f64> {
    Covec2([complex(rng), complex(rng)])
}

/// Haar-ish element of SU(2) from a normalized random column.
pub fn su2<R: Rng>(rng: &mut R) -> Mat2<f64> {
    let mut v = vec2(rng);
    while v.norm() < 1e-3 {
        v = vec2(rng);
    }
    let [a, b] = v.scale(re(v.norm().recip())).0;
    Mat2::new(a, -b.conj(), b, a.conj())
}

/// Weights in [0.5, 1.5] with every |W_I| at least `margin` times Σβ.
pub fn beta<R: Rng>(rng: &mut R, n: usize, margin: f64) -> Vec<f64> {
    loop {
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let total: f64 = b.iter().sum();
        if (0..1u32 << n).all(|s| w_sum_slice(s, &b).abs() >= margin * total) {
            return b;
        }
    }
}

/// A random point of μ_ℂ⁻¹(0): random x, then y_i = c_i·(−x_{i,2}, x_{i,1}) with
/// c a random vector in the kernel of c ↦ Σ c_i x_i(−x_{i,2}, x_{i,1}).
pub fn hyperpolygon<R: Rng>(rng: &mut R, n: usize) -> QuiverRep<f64> {
    let x: Vec<Vec2<f64>> = (0..n).map(|_| vec2(rng)).collect();
    let perp: Vec<Covec2<f64>> = x.iter().map(|v| Covec2([-v.0[1], v.0[0]])).collect();
    let m: Vec<Mat2<f64>> = x.iter().zip(&perp).map(|(v, p)| v.outer(p)).collect();
    let b = DMatrix::from_fn(3, n, |r, k| match r {
        0 => m[k].0[0][0],
        1 => m[k].0[0][1],
        _ => m[k].0[1][0],
    });
    let c0 = DVector::from_fn(n, |_, _| complex(rng));
    let bh = b.adjoint();
    let coef = (&b * &bh).lu().solve(&(&b * &c0)).unwrap_or_else(|| DVector::zeros(3));
    let ker: DVector<Complex<f64>> = c0 - bh * coef;
    let y = perp.iter().zip(ker.iter()).map(|(p, k)| p.scale(*k)).collect();
    QuiverRep { x, y }
}

/// A random unitary hyperpolygon for the given weights.
pub fn unitary_rep<R: Rng>(rng: &mut R, beta: &BetaWeights<f64>) -> Result<QuiverRep<f64>> {
    let tol = Tol::default();
    let rep = hyperpolygon(rng, beta.n());
    unitarize(&rep, beta, &UnitarizeOpts::default(), &tol)
}

/// A random unitary lift of a tangent vector at a unitary hyperpolygon.
pub fn unitary_lift<R: Rng>(rng: &mut R, rep: &QuiverRep<f64>) -> Result<TangentHP<f64>> {
    let n = rep.n();
    let v = TangentHP { xdot: (0..n).map(|_| vec2(rng)).collect(), ydot: (0..n).map(|_| covec2(rng)).collect() };
    project_unitary(rep, &project_dmu_kernel(rep, &v)?)
}

/// Random branch with β ∈ [0.1, 0.5] and |y|² ∈ [0.1, 0.5], in a random unitary frame.
pub fn local_data<R: Rng>(rng: &mut R, r: f64) -> LocalData<f64> {
    let beta: f64 = rng.gen_range(0.1..0.5);
    let b: f64 = rng.gen_range(0.1..0.5);
    let a = 2.0 * beta + b;
    let u = su2(rng);
    let (p, q) = (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU));
    let x = u.dagger().mul_vec(&Vec2([C::from_polar(a.sqrt(), p), re(0.0)]));
    let y = u.left_mul(&Covec2([re(0.0), C::from_polar(b.sqrt(), q)]));
    LocalData { x, y, beta, r }
}

/// Random admissible deformation: ẋ₂ and ẏ₂ free in the aligned frame, ẋ₁ and ẏ₁ forced.
pub fn local_tangent<R: Rng>(rng: &mut R, d: &LocalData<f64>) -> LocalTangent<f64> {
    let f = d.frame().expect("nonzero x");
    let (x1, y2) = (f.u.mul_vec(&d.x).0[0], f.u.dagger().left_mul(&d.y).0[1]);
    let (xd2, yd2) = (complex(rng), complex(rng));
    let xd1 = yd2 * y2.conj() / x1.conj();
    let yd1 = -y2 * xd2 / x1;
    LocalTangent {
        xdot: f.u.dagger().mul_vec(&Vec2([xd1, xd2])),
        ydot: f.u.left_mul(&Covec2([yd1, yd2])),
    }
}

/// A point of μ_ℂ⁻¹(0) that often sits on a stability wall's wrong side: x drawn
/// from a few lines (sometimes zero), y either zero or supported on one line class
/// and annihilating that line.
pub fn structured_rep<R: Rng>(rng: &mut R, n: usize) -> QuiverRep<f64> {
    match rng.gen_range(0..4) {
        0 => hyperpolygon(rng, n),
        mode => {
            let lines: Vec<Vec2<f64>> = (0..rng.gen_range(1..=n)).map(|_| vec2(rng)).collect();
            let class: Vec<usize> = (0..n).map(|_| rng.gen_range(0..lines.len())).collect();
            let mut x: Vec<Vec2<f64>> = class.iter().map(|&k| lines[k].scale(complex(rng))).collect();
            let mut y = vec![Covec2::zero(); n];
            if mode == 2 {
                // y_i = c_i·ann(L) on the class of branch 0, with Σ c_i s_i = 0 so Σ x_i y_i = 0
                let members: Vec<usize> = (0..n).filter(|&i| class[i] == class[0]).collect();
                if members.len() >= 2 {
                    let l = lines[class[0]];
                    let ann = Covec2([-l.0[1], l.0[0]]);
                    let s: Vec<C<f64>> = members.iter().map(|&i| x[i].0[0] / l.0[0]).collect();
                    let mut cs: Vec<C<f64>> = members.iter().map(|_| complex(rng)).collect();
                    let last = members.len() - 1;
                    let partial = (0..last).fold(re(0.0), |a, k| a + cs[k] * s[k]);
                    cs[last] = -partial / s[last];
                    for (k, &i) in members.iter().enumerate() {
                        y[i] = ann.scale(cs[k]);
                    }
                }
            }
            if mode == 3 {
                let i = rng.gen_range(0..n);
                x[i] = Vec2::zero();
            }
            QuiverRep { x, y }
        }
    }
}
