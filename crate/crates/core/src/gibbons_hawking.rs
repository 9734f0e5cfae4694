//! Multi-Taub-NUT metrics V‖dx‖² + V⁻¹Θ² from the harmonic function
//! V_R = R + Σ 1/(4π|x − p_i|), and their ALF → ALE degeneration as R → 0.

use crate::error::{Error, Result};
use crate::quadrature::Rule1;
use crate::scalar::{lit, Real};

pub type Point3<T> = [T; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct GHData<T> {
    pub r: T,
    pub centers: Vec<Point3<T>>,
}

fn sub<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm<T: Real>(a: &Point3<T>) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

impl<T: Real> GHData<T> {
    pub fn new(r: T, centers: Vec<Point3<T>>) -> Result<Self> {
        if !(r >= T::zero()) {
            return Err(Error::Invalid("R must be nonnegative".into()));
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                if norm(&sub(&centers[i], &centers[j])) == T::zero() {
                    return Err(Error::Invalid(format!("centers {i} and {j} coincide")));
                }
            }
        }
        Ok(GHData { r, centers })
    }

    fn check(&self, x: &Point3<T>) -> Result<()> {
        match self.centers.iter().position(|c| norm(&sub(x, c)) == T::zero()) {
            Some(i) => Err(Error::AtCenter(i)),
            None => Ok(()),
        }
    }

    /// ∇V, computed exactly.
    pub fn gradient(&self, x: &Point3<T>) -> Result<Point3<T>> {
        self.check(x)?;
        let mut g = [T::zero(); 3];
        for c in &self.centers {
            let d = sub(x, c);
            let r = norm(&d);
            let k = -(lit::<T>(4.0) * T::PI() * r * r * r).recip();
            for a in 0..3 {
                g[a] = g[a] + k * d[a];
            }
        }
        Ok(g)
    }
}

pub fn potential<T: Real>(g: &GHData<T>, x: &Point3<T>) -> Result<T> {
    g.check(x)?;
    let four_pi = lit::<T>(4.0) * T::PI();
    Ok(g.centers.iter().fold(g.r, |a, c| a + (four_pi * norm(&sub(x, c))).recip()))
}

/// (V, V⁻¹): the coefficient of the flat base metric and of the circle fiber.
pub fn metric_coeffs<T: Real>(g: &GHData<T>, x: &Point3<T>) -> Result<(T, T)> {
    let v = potential(g, x)?;
    if !(v > T::zero()) {
        return Err(Error::NotPositive(format!("V = {v}")));
    }
    Ok((v, v.recip()))
}

/// |Δ_h V| with the seven-point Laplacian. NaN if the stencil touches a center.
pub fn harmonicity_residual<T: Real>(g: &GHData<T>, x: &Point3<T>, step: T) -> T {
    let v = |p: Point3<T>| potential(g, &p).unwrap_or(T::nan());
    let mut lap = -v(*x) * lit(6.0);
    for a in 0..3 {
        for s in [step, -step] {
            let mut p = *x;
            p[a] = p[a] + s;
            lap = lap + v(p);
        }
    }
    (lap / (step * step)).abs()
}

/// F = −2π ⋆dV as the antisymmetric array F[j][k] of dx^j ∧ dx^k coefficients
/// (so F[1][2] = −2π ∂₁V and cyclically).
pub fn curvature_two_form<T: Real>(g: &GHData<T>, x: &Point3<T>) -> Result<[[T; 3]; 3]> {
    let d = g.gradient(x)?;
    let k = -T::TAU();
    let mut f = [[T::zero(); 3]; 3];
    for a in 0..3 {
        let (j, l) = ((a + 1) % 3, (a + 2) % 3);
        f[j][l] = k * d[a];
        f[l][j] = -k * d[a];
    }
    Ok(f)
}

/// The coefficient of dx¹∧dx²∧dx³ in dF, by central differences.
pub fn closedness_residual<T: Real>(g: &GHData<T>, x: &Point3<T>, step: T) -> Result<T> {
    let mut div = T::zero();
    for a in 0..3 {
        let (j, l) = ((a + 1) % 3, (a + 2) % 3);
        let (mut p, mut q) = (*x, *x);
        p[a] = p[a] + step;
        q[a] = q[a] - step;
        div = div + (curvature_two_form(g, &p)?[j][l] - curvature_two_form(g, &q)?[j][l]) / (step + step);
    }
    Ok(div.abs())
}

/// ∫ F over the sphere of the given radius about `center`, outward orientation.
/// Gauss–Legendre in cos θ, trapezoid in the azimuth.
pub fn flux<T: Real>(g: &GHData<T>, center: &Point3<T>, radius: T, n_polar: usize, n_azimuth: usize) -> Result<T> {
    let polar = Rule1::gauss_legendre(-T::one(), T::one(), 1, n_polar);
    let az = Rule1::<T>::periodic(n_azimuth);
    let mut total = T::zero();
    for (ct, wc) in polar.x.iter().zip(&polar.w) {
        let st = (T::one() - *ct * *ct).sqrt();
        for (ph, wp) in az.x.iter().zip(&az.w) {
            let nrm = [st * ph.cos(), st * ph.sin(), *ct];
            let x = [center[0] + radius * nrm[0], center[1] + radius * nrm[1], center[2] + radius * nrm[2]];
            let f = curvature_two_form(g, &x)?;
            // F(e_j, e_l) contracted with the normal via the Hodge dual vector (F₂₃, F₃₁, F₁₂)
            let dual = [f[1][2], f[2][0], f[0][1]];
            let dot = dual[0] * nrm[0] + dual[1] * nrm[1] + dual[2] * nrm[2];
            total = total + *wc * *wp * dot * radius * radius;
        }
    }
    Ok(total)
}
