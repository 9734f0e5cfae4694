//! The glued approximate harmonic metric h_app,R on ℂℙ¹, the glued first variation
//! ν̇_app,R, the Hitchin residual and the quadratures behind the small-R limits.
//!
//! Integrals over the sphere are split with the partition of unity itself:
//!
//! ∫F = Σ_i [∫_{B_δ(p_i)} F + ∫_{δ<|z−p_i|<2δ} χ_i F] + ∫_{|z|≤ρ} χ_∞F + ∫_{|w|≤1/ρ} χ_∞F,
//!
//! with w = 1/z on the last piece. Puncture disks use Gauss–Legendre panels in
//! log r down to `r_min` and a closed local-model tail below it; the remaining
//! pieces are smooth and use plain polar grids. All nodes are evaluated in
//! parallel and summed in a fixed pairwise order.

use crate::error::{Error, Result};
use crate::extrapolate::{loglog_slope, richardson};
use crate::higgs::eval_residues;
use crate::hp_tangent::{hp_norm_sq, TangentHP};
use crate::hyperpolygon::{mu_real, QuiverRep};
use crate::localmodel::{
    boundary_pairing, bulk_closed_at, glue_gap_sup, h_loc, lambda_loc, log_lambda, n_matrix, nu_entries, nu_entries_dr,
    radial_i, AlignedFrame, LocalData, LocalTangent,
};
use crate::mat2::{adjoint_wrt, c, re, traceless, Herm2, Mat2, C};
use crate::quadrature::{try_par_sum, Rule1};
use crate::scalar::{lit, to_f64, Real};

/// Node counts of the composite rules.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCfg {
    /// Inner radius of the log-radial grid on each puncture disk.
    pub r_min: f64,
    /// Gauss–Legendre panels in log r on [log r_min, log δ].
    pub disk_panels: usize,
    /// Panels in r on each gluing annulus [δ, 2δ].
    pub annulus_panels: usize,
    /// Panels in r on the finite chart |z| ≤ ρ.
    pub outer_panels: usize,
    /// Panels in |w| on the chart at infinity.
    pub w_panels: usize,
    /// Nodes per panel.
    pub order: usize,
    /// Angular nodes around punctures and at infinity.
    pub angular: usize,
    /// Angular nodes on the finite chart.
    pub outer_angular: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg {
            r_min: 1e-8,
            disk_panels: 24,
            annulus_panels: 8,
            outer_panels: 32,
            w_panels: 4,
            order: 8,
            angular: 64,
            outer_angular: 256,
        }
    }
}

impl GridCfg {
    /// Half the panels and angular nodes, used for the refinement check.
    pub fn coarsened(&self) -> Self {
        GridCfg {
            disk_panels: (self.disk_panels / 2).max(1),
            annulus_panels: (self.annulus_panels / 2).max(1),
            outer_panels: (self.outer_panels / 2).max(1),
            w_panels: (self.w_panels / 2).max(1),
            angular: (self.angular / 2).max(4),
            outer_angular: (self.outer_angular / 2).max(4),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMetricCfg {
    /// Gluing radius; `None` means a quarter of the smallest puncture distance.
    pub delta: Option<f64>,
    /// Weight exponent ε ∈ (0, ½) of the residual norm.
    pub eps: f64,
    pub grids: GridCfg,
    /// Radius ρ where the finite chart hands over to w = 1/z.
    pub outer_chart_radius: f64,
    /// Largest relative change allowed between the grid and its coarsening.
    pub quad_tol: f64,
}

impl Default for ApproxMetricCfg {
    fn default() -> Self {
        ApproxMetricCfg { delta: None, eps: 0.25, grids: GridCfg::default(), outer_chart_radius: 4.0, quad_tol: 1e-4 }
    }
}

#[derive(Clone, Debug)]
struct Branch<T> {
    d: LocalData<T>,
    da: LocalData<T>,
    frame: AlignedFrame<T>,
    n: Mat2<T>,
    beta_t: T,
    phi: Mat2<T>,
}

/// h_app,R for a unitary hyperpolygon at punctures `p`.
#[derive(Clone, Debug)]
pub struct ApproxMetric<T> {
    pub rep: QuiverRep<T>,
    pub p: Vec<C<T>>,
    pub r: T,
    pub cfg: ApproxMetricCfg,
    pub delta: T,
    branches: Vec<Branch<T>>,
    residues: Vec<Mat2<T>>,
}

/// h_det = (1 + |z|²)^{−n} Π|z − p_i|².
pub fn h_det_eval<T: Real>(z: C<T>, p: &[C<T>]) -> T {
    let base = (T::one() + z.norm_sqr()).powi(-(p.len() as i32));
    p.iter().fold(base, |a, pi| a * (z - pi).norm_sqr())
}

fn psi<T: Real>(t: T) -> [T; 3] {
    if t <= T::zero() {
        return [T::zero(); 3];
    }
    let v = (-t.recip()).exp();
    let t2 = t * t;
    [v, v / t2, v * (t2 * t2).recip() - v * lit::<T>(2.0) / (t2 * t)]
}

/// (χ, χ′, χ″) of the radial bump that is 1 on [0, δ] and 0 on [2δ, ∞):
/// χ = P/(P + Q), P = ψ(2 − r/δ), Q = ψ(r/δ − 1), ψ(t) = e^{−1/t}.
pub fn bump_profile<T: Real>(r: T, delta: T) -> [T; 3] {
    if r <= delta {
        return [T::one(), T::zero(), T::zero()];
    }
    if r >= delta + delta {
        return [T::zero(); 3];
    }
    let two = lit::<T>(2.0);
    let [p, dp, ddp] = psi(two - r / delta);
    let [q, dq, ddq] = psi(r / delta - T::one());
    let (p1, p2) = (-dp / delta, ddp / (delta * delta));
    let (q1, q2) = (dq / delta, ddq / (delta * delta));
    let s = p + q;
    let num = p1 * q - p * q1;
    let chi1 = num / (s * s);
    let chi2 = (p2 * q - p * q2) / (s * s) - two * num * (p1 + q1) / (s * s * s);
    [p / s, chi1, chi2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Disk(usize),
    Annulus(usize),
    Outer,
    Infinity,
}

#[derive(Clone, Copy, Debug)]
struct Node<T> {
    z: C<T>,
    /// Area element dA_z with the partition-of-unity factor folded in.
    weight: T,
    region: Region,
    /// Distance to the puncture for disk and annulus nodes.
    r: T,
}

/// Norms of the Hitchin residual: Σ_i ∫_{B_δ(p_i)} |r^ε T|² per disk and the
/// unweighted remainder of the finite chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualNorm<T> {
    pub disks: Vec<T>,
    pub exterior: T,
}

impl<T: Real> ResidualNorm<T> {
    pub fn disk_total(&self) -> T {
        self.disks.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn total(&self) -> T {
        self.disk_total() + self.exterior
    }
}

impl<T: Real> ApproxMetric<T> {
    pub fn new(rep: &QuiverRep<T>, p: &[C<T>], r: T, cfg: &ApproxMetricCfg) -> Result<Self> {
        let n = rep.n();
        if p.len() != n {
            return Err(Error::Invalid("wrong number of punctures".into()));
        }
        let scale2 = T::one().max(rep.scale() * rep.scale());
        let (m, _) = mu_real(rep);
        if m.norm() / scale2 > lit(1e-8) {
            return Err(Error::NotUnitary(to_f64(m.norm() / scale2)));
        }
        if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
            return Err(Error::Invalid(format!("ε = {} is outside (0, ½)", cfg.eps)));
        }
        let mut min_dist = T::infinity();
        for i in 0..n {
            for j in i + 1..n {
                min_dist = min_dist.min((p[i] - p[j]).norm());
            }
        }
        if min_dist == T::zero() {
            return Err(Error::Invalid("punctures coincide".into()));
        }
        let delta = match cfg.delta {
            Some(d) => lit(d),
            None if n > 1 => min_dist * lit(0.25),
            None => lit(0.25),
        };
        let rho = lit::<T>(cfg.outer_chart_radius);
        let far = p.iter().fold(T::zero(), |a, z| a.max(z.norm()));
        if !(delta > T::zero()) || delta * lit(4.0) > min_dist * lit(1.0 + 1e-12) || far + delta + delta >= rho {
            return Err(Error::Invalid("gluing disks must be disjoint and inside the finite chart".into()));
        }
        let mut branches = Vec::with_capacity(n);
        let mut total_beta = T::zero();
        for i in 0..n {
            let d = LocalData::from_branch(rep.x[i], rep.y[i], r);
            if !(d.beta > T::zero()) {
                return Err(Error::NotUnitary(to_f64(d.beta)));
            }
            total_beta = total_beta + d.beta;
            let (frame, da) = d.aligned().map_err(|_| Error::ZeroVector(i))?;
            branches.push(Branch {
                d,
                da,
                frame,
                n: n_matrix(&rep.x[i])?,
                beta_t: (d.a() + d.b()) * lit(0.5),
                phi: rep.x[i].outer(&rep.y[i]),
            });
        }
        let r_max = total_beta.recip();
        if !(r > T::zero() && r < r_max) {
            return Err(Error::ROutOfRange { r: to_f64(r), r_max: to_f64(r_max) });
        }
        let residues = branches.iter().map(|b| b.phi).collect();
        Ok(ApproxMetric { rep: rep.clone(), p: p.to_vec(), r, cfg: cfg.clone(), delta, branches, residues })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// Largest admissible R for this representation, 1/Σβ_i.
    pub fn r_max(&self) -> T {
        self.branches.iter().fold(T::zero(), |a, b| a + b.d.beta).recip()
    }

    pub fn local_data(&self, i: usize) -> &LocalData<T> {
        &self.branches[i].d
    }

    pub fn bump(&self, i: usize, z: C<T>) -> T {
        bump_profile((z - self.p[i]).norm(), self.delta)[0]
    }

    /// χ_∞ = 1 − Σχ_i.
    pub fn chi_inf(&self, z: C<T>) -> T {
        (0..self.n()).fold(T::one(), |a, i| a - self.bump(i, z))
    }

    fn inner_disk(&self, z: C<T>) -> Option<(usize, C<T>)> {
        (0..self.n()).map(|i| (i, z - self.p[i])).find(|(_, w)| w.norm() <= self.delta)
    }

    fn check_puncture(&self, z: C<T>) -> Result<()> {
        match self.p.iter().position(|pi| (z - pi).norm() == T::zero()) {
            Some(i) => Err(Error::AtPuncture(i)),
            None => Ok(()),
        }
    }

    fn log_lambda_at(&self, i: usize, r: T) -> Result<T> {
        log_lambda(&self.branches[i].d, r).map_err(|_| Error::NotPositive(format!("local model {i} undefined at r = {}", to_f64(r))))
    }

    /// χ_∞ Λ_♮ + Σ χ_i log λ_i N_i, with Λ_♮ = Σ 2Rβ̃_i log|z − p_i| N_i.
    pub fn exponent(&self, z: C<T>) -> Result<Mat2<T>> {
        self.check_puncture(z)?;
        let chi_inf = self.chi_inf(z);
        let mut e = Mat2::zero();
        for (i, b) in self.branches.iter().enumerate() {
            let r = (z - self.p[i]).norm();
            if chi_inf > T::zero() {
                e += b.n.scale_re(chi_inf * lit::<T>(2.0) * self.r * b.beta_t * r.ln());
            }
            let chi = bump_profile(r, self.delta)[0];
            if chi > T::zero() {
                e += b.n.scale_re(chi * self.log_lambda_at(i, r)?);
            }
        }
        Ok(e)
    }

    /// The unimodular factor exp(exponent); on B_δ(p_i) it is cosh f + sinh f·N_i.
    pub fn h_unimodular(&self, z: C<T>) -> Result<Mat2<T>> {
        self.check_puncture(z)?;
        if let Some((i, w)) = self.inner_disk(z) {
            let f = self.log_lambda_at(i, w.norm())?;
            return Ok(Mat2::identity().scale_re(f.cosh()) + self.branches[i].n.scale_re(f.sinh()));
        }
        let h = self.exponent(z)?.exp();
        if !h.is_finite() {
            return Err(Error::NotPositive("non-finite metric".into()));
        }
        Ok(h)
    }

    /// Coefficient of dz of φ.
    pub fn phi(&self, z: C<T>) -> Result<Mat2<T>> {
        eval_residues(&self.residues, &self.p, z)
    }

    /// Coefficient of dz of φ̇.
    pub fn phi_dot(&self, v: &TangentHP<T>, z: C<T>) -> Result<Mat2<T>> {
        let res: Vec<Mat2<T>> = (0..self.n()).map(|i| v.xdot[i].outer(&self.rep.y[i]) + self.rep.x[i].outer(&v.ydot[i])).collect();
        eval_residues(&res, &self.p, z)
    }

    fn local_tangent(&self, v: &TangentHP<T>, i: usize) -> LocalTangent<T> {
        LocalTangent { xdot: v.xdot[i], ydot: v.ydot[i] }.in_frame(&self.branches[i].frame)
    }

    fn lower(n: C<T>, m: C<T>) -> Mat2<T> {
        Mat2::new(n, re(T::zero()), m, -n)
    }

    /// (ν̇_app, ∂_z̄ν̇_app) at z.
    pub fn nu_app_with_dzbar(&self, v: &TangentHP<T>, z: C<T>) -> Result<(Mat2<T>, Mat2<T>)> {
        self.check_puncture(z)?;
        let mut nu = Mat2::zero();
        let mut dnu = Mat2::zero();
        for (i, b) in self.branches.iter().enumerate() {
            let w = z - self.p[i];
            let r = w.norm();
            let [chi, chi1, _] = bump_profile(r, self.delta);
            if chi == T::zero() {
                continue;
            }
            let t = self.local_tangent(v, i);
            let (n, m) = nu_entries(&b.da, &t, r).map_err(|_| Error::NotPositive(format!("local model {i}")))?;
            let (dn, dm) = nu_entries_dr(&b.da, &t, r).map_err(|_| Error::NotPositive(format!("local model {i}")))?;
            let u = b.frame.u;
            let local = u.dagger() * Self::lower(n, m) * u;
            let dlocal = u.dagger() * Self::lower(dn, dm) * u;
            nu += local.scale_re(chi);
            // ∂_z̄ g(r) = g′(r) w/(2r)
            dnu += (local.scale_re(chi1) + dlocal.scale_re(chi)).scale(w / re(r + r));
        }
        Ok((nu, dnu))
    }

    fn curvature_fd(&self, z: C<T>, step: T) -> Result<Mat2<T>> {
        let conn = |q: C<T>| -> Result<Mat2<T>> {
            let hx = self.h_unimodular(q + re(step))? - self.h_unimodular(q - re(step))?;
            let hy = self.h_unimodular(q + c(T::zero(), step))? - self.h_unimodular(q - c(T::zero(), step))?;
            let dz = (hx - hy.scale(c(T::zero(), T::one()))).scale_re((lit::<T>(4.0) * step).recip());
            let hinv = self.h_unimodular(q)?.inverse().ok_or(Error::SingularMetric)?;
            Ok(hinv * dz)
        };
        let ax = conn(z + re(step))? - conn(z - re(step))?;
        let ay = conn(z + c(T::zero(), step))? - conn(z - c(T::zero(), step))?;
        Ok(traceless(&(ax + ay.scale(c(T::zero(), T::one()))).scale_re((lit::<T>(4.0) * step).recip())))
    }
}

/// h_app,R(z) = √h_det · exp(χ_∞Λ_♮ + Σχ_i log λ_i N_i).
pub fn h_app<T: Real>(m: &ApproxMetric<T>, z: C<T>) -> Result<Herm2<T>> {
    let hdet = h_det_eval(z, &m.p);
    if let Some((i, w)) = m.inner_disk(z) {
        m.check_puncture(z)?;
        return h_loc(&m.branches[i].d, w, hdet).map_err(|_| Error::NotPositive(format!("local model {i}")));
    }
    let h = Herm2::symmetrized(&m.h_unimodular(z)?.scale_re(hdet.sqrt()));
    if !h.is_positive() {
        return Err(Error::NotPositive("h_app lost positivity".into()));
    }
    Ok(h)
}

/// dz̄∧dz coefficient of F^⊥ + R²[φ^{†h}, φ] for h = h_app,R.
///
/// On B_δ(p_i) the metric is the local model, whose curvature is known in closed
/// form; elsewhere the curvature ∂_z̄(h⁻¹∂_z h) uses central differences of size `step`.
pub fn hitchin_residual_global<T: Real>(m: &ApproxMetric<T>, z: C<T>, step: T) -> Result<Mat2<T>> {
    let phi = m.phi(z)?;
    let h = m.h_unimodular(z)?;
    let curv = match m.inner_disk(z) {
        Some((i, w)) => {
            let b = &m.branches[i];
            let r = w.norm();
            let l = lambda_loc(&b.d, r).map_err(|_| Error::NotPositive(format!("local model {i}")))?;
            b.n.scale_re(m.r * m.r * l * l * b.d.a() * b.d.b() / (r * r))
        }
        None => m.curvature_fd(z, step)?,
    };
    let pd = adjoint_wrt(&Herm2::symmetrized(&h), &phi)?;
    Ok(curv + pd.commutator(&phi).scale_re(m.r * m.r))
}

/// Σ_i ∫_{B_δ(p_i)} r^{2ε}|T|² dA per disk, plus ∫|T|² over the rest of |z| ≤ ρ.
pub fn weighted_residual_norm<T: Real>(m: &ApproxMetric<T>, step: T) -> Result<ResidualNorm<T>> {
    let nodes = build_nodes(m, &m.cfg.grids);
    let eps2 = lit::<T>(2.0 * m.cfg.eps);
    let density = |nd: &Node<T>| -> Result<T> {
        let t = hitchin_residual_global(m, nd.z, step)?;
        Ok(match nd.region {
            Region::Disk(_) => nd.r.powf(eps2) * t.norm_sqr(),
            _ => t.norm_sqr(),
        })
    };
    let mut disks = Vec::with_capacity(m.n());
    for i in 0..m.n() {
        let sel: Vec<Node<T>> = nodes.iter().copied().filter(|nd| nd.region == Region::Disk(i)).collect();
        let body = try_par_sum(&sel, T::zero(), |nd| Ok(nd.weight * density(nd)?))?;
        // below r_min the integrand behaves like r^{2ε ± 8Rβ − 1}; take the slower decay
        let rmin = lit::<T>(m.cfg.grids.r_min);
        let ring = Rule1::<T>::periodic(m.cfg.grids.angular);
        let mut g = T::zero();
        for (th, wt) in ring.x.iter().zip(&ring.w) {
            let z = m.p[i] + c(rmin * th.cos(), rmin * th.sin());
            g = g + *wt * rmin.powf(eps2) * hitchin_residual_global(m, z, step)?.norm_sqr() * rmin * rmin;
        }
        let rate = (eps2 - lit::<T>(8.0) * m.r * m.branches[i].d.beta).max(eps2 * lit(0.5));
        disks.push(body + g / rate);
    }
    let ext: Vec<Node<T>> = nodes.iter().copied().filter(|nd| matches!(nd.region, Region::Annulus(_) | Region::Outer)).collect();
    let exterior = try_par_sum(&ext, T::zero(), |nd| Ok(nd.weight * density(nd)?))?;
    Ok(ResidualNorm { disks, exterior })
}

/// ν̇_app,R = Σχ_i ν̇_loc,i,R at z, each local variation built in its aligned frame.
pub fn nu_app<T: Real>(m: &ApproxMetric<T>, v: &TangentHP<T>, z: C<T>) -> Result<Mat2<T>> {
    Ok(m.nu_app_with_dzbar(v, z)?.0)
}

fn build_nodes<T: Real>(m: &ApproxMetric<T>, g: &GridCfg) -> Vec<Node<T>> {
    let mut out = Vec::new();
    let delta = m.delta;
    let ang = Rule1::<T>::periodic(g.angular);
    let polar = |out: &mut Vec<Node<T>>, center: C<T>, r: T, wr: T, ring: &Rule1<T>, region: Region, cut: &dyn Fn(C<T>) -> T| {
        for (th, wt) in ring.x.iter().zip(&ring.w) {
            let z = center + c(r * th.cos(), r * th.sin());
            let k = cut(z);
            if k > T::zero() {
                out.push(Node { z, weight: wr * *wt * k, region, r });
            }
        }
    };
    let disk = Rule1::gauss_legendre(lit::<T>(g.r_min).ln(), delta.ln(), g.disk_panels, g.order);
    let ann = Rule1::gauss_legendre(delta, delta + delta, g.annulus_panels, g.order);
    for i in 0..m.n() {
        for (u, wu) in disk.x.iter().zip(&disk.w) {
            let r = u.exp();
            polar(&mut out, m.p[i], r, *wu * r * r, &ang, Region::Disk(i), &|_| T::one());
        }
        for (r, wr) in ann.x.iter().zip(&ann.w) {
            polar(&mut out, m.p[i], *r, *wr * *r, &ang, Region::Annulus(i), &|z| m.bump(i, z));
        }
    }
    let rho = lit::<T>(m.cfg.outer_chart_radius);
    let outer = Rule1::gauss_legendre(T::zero(), rho, g.outer_panels, g.order);
    let oang = Rule1::<T>::periodic(g.outer_angular);
    for (r, wr) in outer.x.iter().zip(&outer.w) {
        polar(&mut out, re(T::zero()), *r, *wr * *r, &oang, Region::Outer, &|z| m.chi_inf(z));
    }
    let inf = Rule1::gauss_legendre(T::zero(), rho.recip(), g.w_panels, g.order);
    for (s, ws) in inf.x.iter().zip(&inf.w) {
        // dA_z = |w|⁻⁴ dA_w, and z = 1/w has |z| = 1/s
        for (th, wt) in ang.x.iter().zip(&ang.w) {
            let z = c(th.cos(), -th.sin()) / re(*s);
            out.push(Node { z, weight: *ws * *s * *wt * s.powi(-4), region: Region::Infinity, r: T::zero() });
        }
    }
    out
}

fn check_refinement<T: Real>(fine: T, coarse: T, tol: f64) -> Result<T> {
    let change = (fine - coarse).abs() / (fine.abs() + lit(1e-12));
    if change > lit(tol) {
        return Err(Error::QuadratureNoConvergence(to_f64(change)));
    }
    Ok(fine)
}

fn morse_on<T: Real>(m: &ApproxMetric<T>, g: &GridCfg) -> Result<T> {
    let nodes = build_nodes(m, g);
    let body = try_par_sum(&nodes, T::zero(), |nd| {
        let phi = m.phi(nd.z)?;
        let h = Herm2::symmetrized(&m.h_unimodular(nd.z)?);
        let pd = adjoint_wrt(&h, &phi)?;
        Ok(nd.weight * m.r * (phi * pd).trace().re)
    })?;
    let rmin = lit::<T>(g.r_min);
    let mut tail = T::zero();
    for b in &m.branches {
        tail = tail + T::TAU() * b.d.a() * b.d.b() * radial_i(&b.d, rmin)?;
    }
    Ok(body + tail)
}

/// Real coefficient of (i/2)∫R tr(φ ∧ φ^{†h}) = ∫ R|φ|²_h dA for h = h_app,R.
/// Tends to 2π·½Σ|y_i|² as R → 0.
pub fn morse_integral<T: Real>(m: &ApproxMetric<T>) -> Result<T> {
    let fine = morse_on(m, &m.cfg.grids)?;
    let coarse = morse_on(m, &m.cfg.grids.coarsened())?;
    check_refinement(fine, coarse, m.cfg.quad_tol)
}

fn metric_on<T: Real>(m: &ApproxMetric<T>, v: &TangentHP<T>, g: &GridCfg) -> Result<T> {
    let nodes = build_nodes(m, g);
    let body = try_par_sum(&nodes, T::zero(), |nd| {
        let phi = m.phi(nd.z)?;
        let pdot = m.phi_dot(v, nd.z)?;
        let (nu, _) = m.nu_app_with_dzbar(v, nd.z)?;
        let cap = pdot + nu.commutator(&phi);
        let h = Herm2::symmetrized(&m.h_unimodular(nd.z)?);
        let pd = adjoint_wrt(&h, &pdot)?;
        Ok(nd.weight * lit::<T>(2.0) * m.r * (pd * cap).trace().re)
    })?;
    let rmin = lit::<T>(g.r_min);
    let mut rest = T::zero();
    for (i, b) in m.branches.iter().enumerate() {
        let t = LocalTangent { xdot: v.xdot[i], ydot: v.ydot[i] };
        rest = rest + bulk_closed_at(&b.d, &t, rmin)? + boundary_pairing(&b.d, &t)?;
    }
    Ok(body + rest)
}

/// g_R(v, v) for the deformation induced by a unitary lift v: the boundary terms at
/// the punctures plus ∫ 2R Re tr(φ̇^{†h}(φ̇ + [ν̇_app, φ])) dA. Tends to 2π·|v|².
pub fn metric_pairing<T: Real>(m: &ApproxMetric<T>, v: &TangentHP<T>) -> Result<T> {
    let fine = metric_on(m, v, &m.cfg.grids)?;
    let coarse = metric_on(m, v, &m.cfg.grids.coarsened())?;
    check_refinement(fine, coarse, m.cfg.quad_tol)
}

// tr(ν̇₁φ̇₂ − ν̇₂φ̇₁ + [ν̇₁, ν̇₂]φ) for the local model of branch i in its aligned frame,
// with ν̇ evaluated at radius r (r = 0 allowed).
fn stokes_density<T: Real>(m: &ApproxMetric<T>, i: usize, v1: &TangentHP<T>, v2: &TangentHP<T>, r: T) -> Result<C<T>> {
    let b = &m.branches[i];
    let nu = |t: &LocalTangent<T>| -> Result<Mat2<T>> {
        if r == T::zero() {
            let n = -t.ydot.0[1] * b.da.y.0[1].conj() / re(b.da.a());
            let mm = -t.xdot.0[1] / b.da.x.0[0];
            return Ok(ApproxMetric::lower(n, mm));
        }
        let (n, mm) = nu_entries(&b.da, t, r)?;
        Ok(ApproxMetric::lower(n, mm))
    };
    let (t1, t2) = (m.local_tangent(v1, i), m.local_tangent(v2, i));
    let (n1, n2) = (nu(&t1)?, nu(&t2)?);
    let phi = b.da.x.outer(&b.da.y);
    let pd = |t: &LocalTangent<T>| t.xdot.outer(&b.da.y) + b.da.x.outer(&t.ydot);
    Ok((n1 * pd(&t2) - n2 * pd(&t1) + n1.commutator(&n2) * phi).trace())
}

fn symplectic_on<T: Real>(m: &ApproxMetric<T>, v1: &TangentHP<T>, v2: &TangentHP<T>, g: &GridCfg) -> Result<C<T>> {
    // ∂̄ν̇_app vanishes off the annuli' outer edges, but the annuli are shared with χ_∞
    let nodes: Vec<Node<T>> = build_nodes(m, g)
        .into_iter()
        .filter(|nd| (0..m.n()).any(|i| (nd.z - m.p[i]).norm() < m.delta + m.delta))
        .collect();
    let body = try_par_sum(&nodes, re(T::zero()), |nd| {
        let phi = m.phi(nd.z)?;
        let (nu1, d1) = m.nu_app_with_dzbar(v1, nd.z)?;
        let (nu2, d2) = m.nu_app_with_dzbar(v2, nd.z)?;
        let cap1 = m.phi_dot(v1, nd.z)? + nu1.commutator(&phi);
        let cap2 = m.phi_dot(v2, nd.z)? + nu2.commutator(&phi);
        Ok(((d1 * cap2).trace() - (d2 * cap1).trace()) * re(lit::<T>(2.0) * nd.weight))
    })?;
    // the local-model part of the integrand is exact, so Stokes gives the disk below r_min
    let rmin = lit::<T>(g.r_min);
    let mut tail = re(T::zero());
    for i in 0..m.n() {
        tail = tail + (stokes_density(m, i, v1, v2, rmin)? - stokes_density(m, i, v1, v2, T::zero())?) * re(T::TAU());
    }
    Ok(body + tail)
}

/// Coefficient of i of −∫ tr(η̇₁∧Φ̇₂ − η̇₂∧Φ̇₁) with η̇ = −∂̄ν̇_app and
/// Φ̇ = φ̇ + [ν̇_app, φ]. It equals −2π·hp_symplectic(v1, v2).
pub fn symplectic_pullback<T: Real>(m: &ApproxMetric<T>, v1: &TangentHP<T>, v2: &TangentHP<T>) -> Result<C<T>> {
    let fine = symplectic_on(m, v1, v2, &m.cfg.grids)?;
    let coarse = symplectic_on(m, v1, v2, &m.cfg.grids.coarsened())?;
    let scale = fine.norm() + lit::<T>(1e-12) * (T::one() + hp_norm_sq(v1) + hp_norm_sq(v2));
    let change = (fine - coarse).norm() / scale;
    if change > lit(m.cfg.quad_tol) {
        return Err(Error::QuadratureNoConvergence(to_f64(change)));
    }
    Ok(fine)
}

/// ∫ R|φ|²_h over r_in < |z| < r_out, once in polar z coordinates and once in
/// w = 1/z with the |w|⁻⁴ Jacobian. The two agree up to quadrature error.
pub fn chart_consistency<T: Real>(m: &ApproxMetric<T>, r_in: T, r_out: T) -> Result<(T, T)> {
    let g = &m.cfg.grids;
    let density = |z: C<T>| -> Result<T> {
        let phi = m.phi(z)?;
        let pd = adjoint_wrt(&Herm2::symmetrized(&m.h_unimodular(z)?), &phi)?;
        Ok(m.r * (phi * pd).trace().re)
    };
    let ring = Rule1::<T>::periodic(g.outer_angular);
    let zr = Rule1::gauss_legendre(r_in, r_out, g.outer_panels, g.order);
    let wr = Rule1::gauss_legendre(r_out.recip(), r_in.recip(), g.outer_panels, g.order);
    let mut nodes = Vec::with_capacity(2 * zr.len() * ring.len());
    for (r, w) in zr.x.iter().zip(&zr.w) {
        for (th, wt) in ring.x.iter().zip(&ring.w) {
            nodes.push((0u8, c(*r * th.cos(), *r * th.sin()), *w * *r * *wt));
        }
    }
    for (s, w) in wr.x.iter().zip(&wr.w) {
        for (th, wt) in ring.x.iter().zip(&ring.w) {
            nodes.push((1u8, c(th.cos(), -th.sin()) / re(*s), *w * *s * *wt * s.powi(-4)));
        }
    }
    let part = |chart: u8| {
        let sel: Vec<(C<T>, T)> = nodes.iter().filter(|n| n.0 == chart).map(|n| (n.1, n.2)).collect();
        try_par_sum(&sel, T::zero(), |(z, w)| Ok(*w * density(*z)?))
    };
    Ok((part(0)?, part(1)?))
}

/// Sign relating [`symplectic_pullback`] to 2π·hp_symplectic.
pub const SYMPLECTIC_SIGN: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Morse,
    Metric,
    Residual,
    GlueGap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow<T> {
    pub r: T,
    pub value: T,
    pub target: T,
    pub abs_err: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable<T> {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow<T>>,
    /// Log-log slope of abs_err against R.
    pub slope: T,
    /// Polynomial extrapolation of the values to R = 0.
    pub extrapolant: T,
}

/// Evaluates one quantity along decreasing R for a fixed representation.
///
/// Targets: πΣ|y_i|² for `Morse`, 2π|v|² for `Metric`, 0 for the residual (sum of
/// the per-disk weighted norms) and for the gluing gap (sup over [δ, 2δ]).
pub fn r_sweep<T: Real>(
    kind: SweepKind,
    rep: &QuiverRep<T>,
    p: &[C<T>],
    cfg: &ApproxMetricCfg,
    rs: &[T],
    v: Option<&TangentHP<T>>,
    step: T,
) -> Result<SweepTable<T>> {
    if rs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid("R values must be strictly decreasing".into()));
    }
    let mut rows = Vec::with_capacity(rs.len());
    for &r in rs {
        let m = ApproxMetric::new(rep, p, r, cfg)?;
        let (value, target) = match kind {
            SweepKind::Morse => {
                let b = m.branches.iter().fold(T::zero(), |a, b| a + b.d.b());
                (morse_integral(&m)?, T::PI() * b)
            }
            SweepKind::Metric => {
                let v = v.ok_or_else(|| Error::Invalid("metric sweep needs a tangent vector".into()))?;
                (metric_pairing(&m, v)?, T::TAU() * hp_norm_sq(v))
            }
            SweepKind::Residual => (weighted_residual_norm(&m, step)?.disk_total(), T::zero()),
            SweepKind::GlueGap => {
                let mut worst = T::zero();
                for b in &m.branches {
                    worst = worst.max(glue_gap_sup(&b.d, m.delta, m.delta + m.delta, 16)?);
                }
                (worst, T::zero())
            }
        };
        rows.push(SweepRow { r, value, target, abs_err: (value - target).abs() });
    }
    let xs: Vec<T> = rows.iter().map(|r| r.r).collect();
    let errs: Vec<T> = rows.iter().map(|r| r.abs_err).collect();
    let vals: Vec<T> = rows.iter().map(|r| r.value).collect();
    let slope = if rows.len() >= 2 { loglog_slope(&xs, &errs)? } else { T::nan() };
    let extrapolant = richardson(&xs, &vals)?;
    Ok(SweepTable { kind, rows, slope, extrapolant })
}
