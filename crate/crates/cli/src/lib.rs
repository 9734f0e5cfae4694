//! Command-line front end: validation, unitarization, the map to Higgs data,
//! R-sweeps of the glued metric, Torelli tables and the Gibbons–Hawking demo.
//!
//! [`run`] does all the work and returns bytes instead of writing them, so tests
//! can compare outputs across runs and thread counts.

pub mod io;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hyperpolygon::gibbons_hawking::{metric_coeffs, GHData};
use hyperpolygon::globalmetric::{r_sweep, ApproxMetricCfg, SweepKind};
use hyperpolygon::higgs::{default_punctures, det_phi, nilpotent_component, parabolic_stability, r_max, to_higgs, torelli_table, NilpotentComponent};
use hyperpolygon::hp_tangent::check_unitary_lift;
use hyperpolygon::hyperpolygon::{is_stable, mu_complex, mu_real, subset_indices, unitarize, BetaWeights, QuiverRep, UnitarizeOpts};
use hyperpolygon::{sample, Tol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io::{fmt_f64, mat_record, pair, read_json, to_csv, to_json, BetaRecord, Pair, RepRecord};

/// Finite-difference step for the Hitchin residual in sweeps.
pub const RESIDUAL_STEP: f64 = 1e-4;

/// Default sweep radii as fractions of R_max.
pub const DEFAULT_FRACTIONS: [f64; 3] = [0.1, 0.05, 0.025];

#[derive(Parser, Debug, Clone)]
#[command(name = "hyperpolygon", version, about = "Hyperpolygons, their Higgs bundles and the small-R hyperkähler metric")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Gluing radius δ around each puncture.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Weight exponent ε ∈ (0, 1/2) of the residual norm.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Log-radial panels per puncture disk; the other radial grids scale with it.
    #[arg(long = "grid-radial", global = true)]
    pub grid_radial: Option<usize>,
    /// Angular nodes per puncture disk; the finite chart uses four times as many.
    #[arg(long = "grid-angular", global = true)]
    pub grid_angular: Option<usize>,
    /// Relative change allowed when the quadrature grid is halved.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Value of R; repeat for sweeps.
    #[arg(long = "R", global = true)]
    pub r: Vec<f64>,
    /// Seed for random tangent vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON file with quadrature settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check μ_ℂ = 0, nilpotent residues, weight genericity and stability.
    Validate { input: PathBuf },
    /// Move a stable representation onto μ_ℝ = (0, β).
    Unitarize { input: PathBuf },
    /// Residues, flags and weights of the parabolic Higgs bundle at one R.
    Map { input: PathBuf },
    /// Evaluate a glued-metric quantity along decreasing R.
    Sweep { kind: SweepArg, input: PathBuf },
    /// Torelli numbers of the spheres in the n = 4 nilpotent cone.
    Torelli { input: PathBuf },
    /// Potential profiles V_R and V_R⁻¹ of multi-Taub–NUT spaces.
    GhDemo {
        #[arg(long, default_value_t = 3)]
        centers: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepArg {
    Morse,
    Metric,
    Residual,
    Gluegap,
}

impl From<SweepArg> for SweepKind {
    fn from(k: SweepArg) -> Self {
        match k {
            SweepArg::Morse => SweepKind::Morse,
            SweepArg::Metric => SweepKind::Metric,
            SweepArg::Residual => SweepKind::Residual,
            SweepArg::Gluegap => SweepKind::GlueGap,
        }
    }
}

/// Optional overrides of [`ApproxMetricCfg`] read from `--config`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfgRecord {
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub r_min: Option<f64>,
    pub disk_panels: Option<usize>,
    pub annulus_panels: Option<usize>,
    pub outer_panels: Option<usize>,
    pub w_panels: Option<usize>,
    pub order: Option<usize>,
    pub angular: Option<usize>,
    pub outer_angular: Option<usize>,
    pub outer_chart_radius: Option<f64>,
    pub quad_tol: Option<f64>,
}

/// What a command produced. `payload` goes to `--out` or stdout, `log` to stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub payload: Vec<u8>,
    pub log: String,
    pub code: i32,
}

impl Outcome {
    fn data(payload: Vec<u8>) -> Self {
        Outcome { payload, log: String::new(), code: 0 }
    }
}

fn in_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<T> {
    if !(v >= lo && v <= hi) {
        bail!("--{name} = {v} outside [{lo}, {hi}]");
    }
    Ok(v)
}

/// Quadrature settings from defaults, then `--config`, then flags.
pub fn build_cfg(cli: &Cli) -> Result<ApproxMetricCfg> {
    let mut cfg = ApproxMetricCfg::default();
    if let Some(path) = &cli.config {
        let r: CfgRecord = read_json(path)?;
        let g = &mut cfg.grids;
        cfg.delta = r.delta.or(cfg.delta);
        cfg.eps = r.eps.unwrap_or(cfg.eps);
        g.r_min = r.r_min.unwrap_or(g.r_min);
        g.disk_panels = r.disk_panels.unwrap_or(g.disk_panels);
        g.annulus_panels = r.annulus_panels.unwrap_or(g.annulus_panels);
        g.outer_panels = r.outer_panels.unwrap_or(g.outer_panels);
        g.w_panels = r.w_panels.unwrap_or(g.w_panels);
        g.order = r.order.unwrap_or(g.order);
        g.angular = r.angular.unwrap_or(g.angular);
        g.outer_angular = r.outer_angular.unwrap_or(g.outer_angular);
        cfg.outer_chart_radius = r.outer_chart_radius.unwrap_or(cfg.outer_chart_radius);
        cfg.quad_tol = r.quad_tol.unwrap_or(cfg.quad_tol);
    }
    if let Some(d) = cli.delta {
        cfg.delta = Some(in_range("delta", d, 1e-6, 10.0)?);
    }
    if let Some(e) = cli.eps {
        cfg.eps = in_range("eps", e, 1e-6, 0.5 - 1e-6)?;
    }
    if let Some(k) = cli.grid_radial {
        let k = in_range("grid-radial", k, 2, 4096)?;
        cfg.grids.disk_panels = k;
        cfg.grids.annulus_panels = (k / 3).max(1);
        cfg.grids.outer_panels = 4 * k / 3;
        cfg.grids.w_panels = (k / 6).max(1);
    }
    if let Some(m) = cli.grid_angular {
        let m = in_range("grid-angular", m, 8, 1 << 16)?;
        cfg.grids.angular = m;
        cfg.grids.outer_angular = 4 * m;
    }
    if let Some(t) = cli.tol {
        cfg.quad_tol = in_range("tol", t, 1e-14, 1.0)?;
    }
    Ok(cfg)
}

fn load(path: &std::path::Path) -> Result<RepRecord> {
    let rec: RepRecord = read_json(path)?;
    rec.check_shape()?;
    if !rec.is_finite() {
        bail!("non-finite entries in {}", path.display());
    }
    Ok(rec)
}

fn weights(rec: &RepRecord) -> Result<BetaWeights<f64>> {
    Ok(BetaWeights::new(rec.beta.clone(), &Tol::default())?)
}

/// The representation itself when already unitary, its unitarization otherwise.
fn unitary_of(rec: &RepRecord, beta: &BetaWeights<f64>) -> Result<QuiverRep<f64>> {
    let rep = rec.rep();
    if real_residual(&rep, &rec.beta) <= 1e-10 {
        return Ok(rep);
    }
    Ok(unitarize(&rep, beta, &UnitarizeOpts::default(), &Tol::default())?)
}

fn real_residual(rep: &QuiverRep<f64>, beta: &[f64]) -> f64 {
    let (m, s) = mu_real(rep);
    s.iter().zip(beta).fold(m.norm(), |a, (si, bi)| a.max((si - bi).abs()))
}

fn complex_residual(rep: &QuiverRep<f64>) -> (f64, f64) {
    let (m, s) = mu_complex(rep);
    (m.max_abs(), s.iter().fold(0.0, |a, z| a.max(z.norm())))
}

fn cmd_validate(rec: &RepRecord) -> Outcome {
    let mut checks: Vec<(bool, &str, String)> = Vec::new();
    let rep = rec.rep();
    let scale = 1f64.max(rep.scale() * rep.scale());
    let (mat, scal) = complex_residual(&rep);
    checks.push((scal <= 1e-10 * scale, "residue nilpotency (y_i x_i = 0)", fmt_f64(scal)));
    checks.push((mat <= 1e-10 * scale, "complex moment map (sum of (x_i y_i)^0 = 0)", fmt_f64(mat)));
    match BetaWeights::new(rec.beta.clone(), &Tol::default()) {
        Ok(b) => {
            checks.push((true, "weights generic", "every |W_I| above the wall tolerance".into()));
            match is_stable(&rep, &b, &Tol::default()) {
                Ok(s) => checks.push((s, "stability", if s { "no destabilizing straight subset".into() } else { "destabilized".into() })),
                Err(e) => checks.push((false, "stability", e.to_string())),
            }
        }
        Err(e) => checks.push((false, "weights generic", e.to_string())),
    }
    if let Some(t) = rec.tangent() {
        checks.push((check_unitary_lift(&rep, &t, 1e-10), "unitary lift of the tangent", String::new()));
    }
    let mut log = String::new();
    for (ok, name, detail) in &checks {
        log.push_str(&format!("{} {name}: {detail}\n", if *ok { "PASS" } else { "FAIL" }));
    }
    // unitarity is informational: unitarize fixes it
    log.push_str(&format!("INFO real moment map residual: {}\n", fmt_f64(real_residual(&rep, &rec.beta))));
    let failed = checks.iter().find(|c| !c.0);
    if let Some((_, name, _)) = failed {
        log.push_str(&format!("invariant violated: {name}\n"));
    }
    Outcome { payload: Vec::new(), log, code: if failed.is_some() { 2 } else { 0 } }
}

#[derive(Serialize)]
struct MapRecord {
    #[serde(rename = "R")]
    r: f64,
    punctures: Vec<Pair>,
    alpha: Vec<f64>,
    residues: Vec<[[Pair; 2]; 2]>,
    flags: Vec<[Pair; 2]>,
    det_phi: Vec<Pair>,
    parabolic_stable: bool,
    nilpotent_component: Option<String>,
}

fn cmd_map(cli: &Cli, rec: &RepRecord) -> Result<Outcome> {
    let beta = weights(rec)?;
    let rep = rec.rep();
    let p = rec.punctures().unwrap_or_else(|| default_punctures(rec.n));
    let r = match cli.r.as_slice() {
        [] => 0.1 * r_max(&beta),
        [r] => *r,
        _ => bail!("map takes a single --R"),
    };
    let tol = Tol::default();
    let h = to_higgs(&rep, &p, &beta, r, &tol)?;
    let comp = if rec.n == 4 {
        match nilpotent_component(&h, &tol) {
            Ok(NilpotentComponent::CentralSphere) => Some("central sphere".to_string()),
            Ok(NilpotentComponent::ExteriorPair(i)) => Some(format!("exterior pair {{{}}}", i.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(","))),
            Ok(NilpotentComponent::DistinguishedExterior) => Some("distinguished exterior".to_string()),
            Err(_) => None,
        }
    } else {
        None
    };
    let out = MapRecord {
        r,
        punctures: h.p.iter().map(|z| pair(*z)).collect(),
        alpha: h.alpha.alpha.clone(),
        residues: h.phi.iter().map(mat_record).collect(),
        flags: h.flags.iter().map(|f| [pair(f.0[0]), pair(f.0[1])]).collect(),
        det_phi: det_phi(&h)?.into_iter().map(pair).collect(),
        parabolic_stable: parabolic_stability(&h, &tol)?,
        nilpotent_component: comp,
    };
    Ok(Outcome::data(to_json(&out)?))
}

fn cmd_sweep(cli: &Cli, kind: SweepArg, rec: &RepRecord) -> Result<Outcome> {
    let beta = weights(rec)?;
    let rep = unitary_of(rec, &beta)?;
    let p = rec.punctures().unwrap_or_else(|| default_punctures(rec.n));
    let rm = r_max(&beta);
    let mut rs: Vec<f64> = if cli.r.is_empty() { DEFAULT_FRACTIONS.iter().map(|f| f * rm).collect() } else { cli.r.clone() };
    rs.sort_by(|a, b| b.total_cmp(a));
    rs.dedup();
    let v = match kind {
        SweepArg::Metric => Some(match rec.tangent() {
            Some(t) if rec.rep() == rep => t,
            Some(_) => bail!("a supplied tangent needs a unitary representation"),
            None => sample::unitary_lift(&mut ChaCha8Rng::seed_from_u64(cli.seed), &rep)?,
        }),
        _ => None,
    };
    let table = r_sweep(kind.into(), &rep, &p, &build_cfg(cli)?, &rs, v.as_ref(), RESIDUAL_STEP)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| [r.r, r.value, r.target, r.abs_err, table.slope, table.extrapolant].iter().map(|&x| fmt_f64(x)).collect())
        .collect();
    let mut out = Outcome::data(to_csv(&["R", "value", "target", "abs_err", "slope_fit", "extrapolant"], &rows)?);
    out.log = format!("slope {:.4}, extrapolant {}\n", table.slope, fmt_f64(table.extrapolant));
    Ok(out)
}

fn cmd_torelli(cli: &Cli, beta: &[f64]) -> Result<Outcome> {
    let b = BetaWeights::new(beta.to_vec(), &Tol::default())?;
    let rs = if cli.r.is_empty() { vec![0.1 * r_max(&b)] } else { cli.r.clone() };
    let mut rows = Vec::new();
    for r in rs {
        for row in torelli_table(&b, r)? {
            let name = subset_indices(row.subset, 4).iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
            let mut cells = vec![fmt_f64(r), format!("{{{name}}}")];
            cells.extend(row.tau_hp.iter().chain(&row.tau_hitchin).chain([&row.ratio]).map(|&x| fmt_f64(x)));
            rows.push(cells);
        }
    }
    let header = ["R", "I", "tau_hp_j1", "tau_hp_j2", "tau_hp_j3", "tau_hitchin_j1", "tau_hitchin_j2", "tau_hitchin_j3", "ratio"];
    Ok(Outcome::data(to_csv(&header, &rows)?))
}

/// Centers on the x₃-axis at unit spacing, sampled along the diagonal ray.
fn cmd_gh(cli: &Cli, centers: usize) -> Result<Outcome> {
    let n = in_range("centers", centers, 1, 64)?;
    let pts: Vec<[f64; 3]> = (0..n).map(|k| [0.0, 0.0, k as f64 - (n - 1) as f64 / 2.0]).collect();
    let rs = if cli.r.is_empty() { vec![1.0, 0.1, 0.01, 0.0] } else { cli.r.clone() };
    let dir = 1.0 / 3f64.sqrt();
    let mut rows = Vec::new();
    for r in rs {
        let g = GHData::new(r, pts.clone())?;
        for k in -4..=16 {
            let t = 10f64.powf(k as f64 / 4.0);
            let (v, vi) = metric_coeffs(&g, &[t * dir, t * dir, t * dir])?;
            rows.push([r, t, v, vi].iter().map(|&x| fmt_f64(x)).collect());
        }
    }
    Ok(Outcome::data(to_csv(&["R", "abs_x", "V", "V_inv"], &rows)?))
}

/// Runs one command. Errors are module failures; invariant failures in
/// `validate` come back as an [`Outcome`] with code 2.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { input } => {
            let rec: RepRecord = read_json(input)?;
            if let Err(e) = rec.check_shape() {
                return Ok(Outcome { payload: Vec::new(), log: format!("FAIL shape: {e}\ninvariant violated: shape\n"), code: 2 });
            }
            if !rec.is_finite() {
                return Ok(Outcome { payload: Vec::new(), log: "FAIL finite entries\ninvariant violated: finite entries\n".into(), code: 2 });
            }
            Ok(cmd_validate(&rec))
        }
        Command::Unitarize { input } => {
            let rec = load(input)?;
            let beta = weights(&rec)?;
            let u = unitarize(&rec.rep(), &beta, &UnitarizeOpts::default(), &Tol::default())?;
            let mut out = RepRecord::from_rep(&u, &rec.beta);
            out.punctures = rec.punctures.clone();
            let mut o = Outcome::data(to_json(&out)?);
            o.log = format!("real moment map residual {}\n", fmt_f64(real_residual(&u, &rec.beta)));
            Ok(o)
        }
        Command::Map { input } => cmd_map(cli, &load(input)?),
        Command::Sweep { kind, input } => cmd_sweep(cli, *kind, &load(input)?),
        Command::Torelli { input } => {
            let rec: BetaRecord = read_json(input)?;
            cmd_torelli(cli, &rec.beta)
        }
        Command::GhDemo { centers } => cmd_gh(cli, *centers),
    }
    .with_context(|| format!("{:?} failed", std::mem::discriminant(&cli.command)))
}

/// The shipped example: a unitary n = 4 hyperpolygon with generic weights.
pub fn example_n4() -> Result<RepRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let beta = BetaWeights::new(sample::beta(&mut rng, 4, 0.05), &Tol::default())?;
    let rep = sample::unitary_rep(&mut rng, &beta)?;
    Ok(RepRecord::from_rep(&rep, beta.as_slice()))
}
