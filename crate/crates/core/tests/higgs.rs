use hyperpolygon::higgs::{
    alpha_of, biswas_membership, chamber_correspondence, default_punctures, det_phi, eval_phi, from_higgs, morse_hitchin_fixed, morse_hp,
    morse_hp_direct, nilpotent_component, parabolic_stability, phi_dot, quadratic_differential_at, r_max, to_higgs, torelli_table,
    NilpotentComponent, ParabolicHiggs,
};
use hyperpolygon::hp_tangent::nu_flags;
use hyperpolygon::hyperpolygon::{act, subset_from, unitarize, w_sum, BetaWeights, GroupElt, QuiverRep, UnitarizeOpts};
use hyperpolygon::mat2::{c, re, Covec2, Mat2, Vec2, C};
use hyperpolygon::{sample, Error, Tol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn tol() -> Tol<f64> {
    Tol::default()
}

fn weights(b: &[f64]) -> BetaWeights<f64> {
    BetaWeights::new(b.to_vec(), &tol()).unwrap()
}

fn invariants(rep: &QuiverRep<f64>) -> Vec<C<f64>> {
    let n = rep.n();
    let mut out = vec![];
    for i in 0..n {
        for j in 0..n {
            out.push((rep.x[i].outer(&rep.y[i]) * rep.x[j].outer(&rep.y[j])).trace());
        }
    }
    out
}

/// y = 0 except on {1,2}, x₁ ∥ x₂ ∥ e₁ and x₃ ∥ x₄ ∥ e₂: the fixed point of type X_{12}.
fn x12_fixed_point(beta: &BetaWeights<f64>) -> QuiverRep<f64> {
    let rep = QuiverRep::new(
        vec![Vec2::real(1.0, 0.0), Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0), Vec2::real(0.0, 1.0)],
        vec![Covec2::real(0.0, 1.0), Covec2::real(0.0, -1.0), Covec2::zero(), Covec2::zero()],
    )
    .unwrap();
    unitarize(&rep, beta, &UnitarizeOpts::default(), &tol()).unwrap()
}

#[test]
fn alpha_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let a = alpha_of(&b, 0.1).unwrap();
    for (got, want) in a.alpha.iter().zip([0.4, 0.4, 0.4, 0.3]) {
        assert!((got - want).abs() < 1e-15);
    }
    assert!(alpha_of(&b, 1e-9).unwrap().alpha.iter().all(|x| (x - 0.5).abs() < 1e-8));
    assert!(matches!(alpha_of(&b, 0.2), Err(Error::ROutOfRange { .. })));
    assert!(matches!(alpha_of(&b, 0.0), Err(Error::ROutOfRange { .. })));
    assert_eq!(r_max(&b), 0.2);
}

#[test]
fn to_higgs_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let p = default_punctures(4);
    let x = vec![Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0), Vec2::real(1.0, 1.0), Vec2::real(1.0, -1.0)];
    let y0 = QuiverRep::new(x, vec![Covec2::zero(); 4]).unwrap();
    let h = to_higgs(&y0, &p, &b, 0.1, &tol()).unwrap();
    assert!(h.phi.iter().all(|m| *m == Mat2::zero()));
    let s = 0.5f64.sqrt();
    assert!((h.flags[2] - Vec2::real(s, s)).norm() < 1e-15);
    assert!(parabolic_stability(&h, &tol()).unwrap());

    let fp = QuiverRep::new(
        vec![Vec2::real(1.0, 0.0), Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0), Vec2::real(0.0, 1.0)],
        vec![Covec2::real(0.0, 1.0), Covec2::real(0.0, -1.0), Covec2::zero(), Covec2::zero()],
    )
    .unwrap();
    let h = to_higgs(&fp, &p, &b, 0.1, &tol()).unwrap();
    assert_eq!(h.phi[0], Mat2::real(0.0, 1.0, 0.0, 0.0));

    let unstable = QuiverRep::new(
        vec![Vec2::real(1.0, 0.0), Vec2::real(2.0, 0.0), Vec2::real(-1.0, 0.0), Vec2::real(1.0, 1.0)],
        vec![Covec2::zero(); 4],
    )
    .unwrap();
    assert_eq!(to_higgs(&unstable, &p, &b, 0.1, &tol()), Err(Error::NotStable));
}

#[test]
fn higgs_invariants_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 4..=6 {
        let b = weights(&sample::beta(&mut rng, n, 0.02));
        let rep = sample::hyperpolygon(&mut rng, n);
        let p = default_punctures(n);
        let h = to_higgs(&rep, &p, &b, 0.5 * r_max(&b), &tol()).unwrap();
        let sum = h.phi.iter().fold(Mat2::zero(), |a, m| a + *m);
        assert!(sum.max_abs() < 1e-12);
        for (m, f) in h.phi.iter().zip(&h.flags) {
            assert!(m.trace().norm() < 1e-12 && m.det().norm() < 1e-12);
            assert!(m.mul_vec(f).norm() < 1e-12);
            // image ⊆ ⟨F⟩: the column space is spanned by f
            let col = m.mul_vec(&Vec2::real(1.0, 0.0)) + m.mul_vec(&Vec2::real(0.0, 1.0));
            assert!(col.cross(f).norm() < 1e-12);
        }
        let back = from_higgs(&h, &tol()).unwrap();
        for (a, b) in invariants(&rep).iter().zip(invariants(&back)) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn from_higgs_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let alpha = alpha_of(&b, 0.1).unwrap();
    let h = ParabolicHiggs {
        p: default_punctures(4),
        phi: vec![Mat2::real(0.0, 1.0, 0.0, 0.0), Mat2::real(0.0, -1.0, 0.0, 0.0), Mat2::zero(), Mat2::zero()],
        flags: vec![Vec2::real(1.0, 0.0), Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0), Vec2::real(0.0, 1.0)],
        alpha,
    };
    let rep = from_higgs(&h, &tol()).unwrap();
    assert_eq!(rep.x[0], Vec2::real(1.0, 0.0));
    assert_eq!(rep.y[0], Covec2::real(0.0, 1.0));
    assert_eq!(rep.y[2], Covec2::zero());
    assert_eq!(rep.x[2], Vec2::real(0.0, 1.0));

    let mut bad = h.clone();
    bad.phi[0] = Mat2::real(1.0, 0.0, 0.0, 0.0);
    assert_eq!(from_higgs(&bad, &tol()), Err(Error::NotNilpotent(0)));
    let mut bad = h.clone();
    bad.flags[0] = Vec2::real(0.0, 1.0);
    assert_eq!(from_higgs(&bad, &tol()), Err(Error::FlagMismatch(0)));
}

#[test]
fn eval_phi_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let b = weights(&sample::beta(&mut rng, 5, 0.02));
    let rep = sample::hyperpolygon(&mut rng, 5);
    let h = to_higgs(&rep, &default_punctures(5), &b, 0.1, &tol()).unwrap();
    // Σφ_i = 0 kills the 1/z term
    let far: Vec<f64> = [1e3, 1e4].iter().map(|&r| eval_phi(&h, c(r, 0.3 * r)).unwrap().norm() * r * r).collect();
    assert!((far[0] / far[1] - 1.0).abs() < 1e-2);
    let eps = 1e-7;
    let z = h.p[2] + c(eps, 0.0);
    assert!((eval_phi(&h, z).unwrap().scale(re(eps)) - h.phi[2]).max_abs() < 1e-5);
    assert_eq!(eval_phi(&h, h.p[1]), Err(Error::AtPuncture(1)));

    let zero = ParabolicHiggs { phi: vec![Mat2::zero(); 5], ..h.clone() };
    assert_eq!(eval_phi(&zero, c(0.2, 0.1)).unwrap(), Mat2::zero());
}

#[test]
fn phi_dot_residues() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let b = weights(&sample::beta(&mut rng, 4, 0.02));
    let rep = sample::unitary_rep(&mut rng, &b).unwrap();
    let v = sample::unitary_lift(&mut rng, &rep).unwrap();
    let p = default_punctures::<f64>(4);
    assert_eq!(phi_dot(&rep, &hyperpolygon::hp_tangent::TangentHP::zero(4), &p, c(0.1, 0.2)).unwrap(), Mat2::zero());
    for i in 0..4 {
        let res = v.xdot[i].outer(&rep.y[i]) + rep.x[i].outer(&v.ydot[i]);
        // (φ + εφ̇)(x + εẋ) has no first-order term
        let first = res.mul_vec(&rep.x[i]) + rep.x[i].outer(&rep.y[i]).mul_vec(&v.xdot[i]);
        assert!(first.norm() < 1e-12);
        let nu = nu_flags(&rep, &v, i).unwrap();
        let phi = rep.x[i].outer(&rep.y[i]);
        assert!((res + nu.commutator(&phi)).mul_vec(&rep.x[i]).norm() < 1e-12);
        // residue of φ̇ at p_i
        let eps = 1e-7;
        let got = phi_dot(&rep, &v, &p, p[i] + c(0.0, eps)).unwrap().scale(c(0.0, eps));
        assert!((got - res).max_abs() < 1e-5);
    }
}

#[test]
fn parabolic_stability_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let alpha = alpha_of(&b, 0.1).unwrap();
    let f = Vec2::real(1.0, 0.0);
    // all flags equal, I = [n]: W_[n](β) > 0 here, so this destabilizes
    let equal = ParabolicHiggs { p: default_punctures(4), phi: vec![Mat2::zero(); 4], flags: vec![f; 4], alpha: alpha.clone() };
    assert!(!parabolic_stability(&equal, &tol()).unwrap());
    // straight {1,2,3} with W = 1 > 0
    let straight = ParabolicHiggs { flags: vec![f, f, f, Vec2::real(0.0, 1.0)], ..equal.clone() };
    assert!(!parabolic_stability(&straight, &tol()).unwrap());
    // slope of the flag line is n/2 + R·W_I(β)
    let g = Vec2::real(0.0, 1.0);
    let pair = ParabolicHiggs { flags: vec![f, f, g, Vec2::real(1.0, 1.0)], ..equal };
    assert!(parabolic_stability(&pair, &tol()).unwrap());
}

#[test]
fn stability_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = 0;
    for k in 0..200 {
        let n = 4 + k % 3;
        let b = weights(&sample::beta(&mut rng, n, 0.01));
        let rep = sample::hyperpolygon(&mut rng, n);
        for f in [0.3, 0.1, 0.03] {
            let h = to_higgs(&rep, &default_punctures(n), &b, f * r_max(&b), &tol()).unwrap();
            assert!(parabolic_stability(&h, &tol()).unwrap());
            checked += 1;
        }
    }
    assert_eq!(checked, 600);
}

#[test]
fn det_phi_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let b = weights(&sample::beta(&mut rng, 4, 0.02));
    let rep = sample::hyperpolygon(&mut rng, 4);
    let p = default_punctures(4);
    let h = to_higgs(&rep, &p, &b, 0.1, &tol()).unwrap();
    let q = det_phi(&h).unwrap();
    assert_eq!(q.len(), 1);
    for z in [c(0.3, 0.1), c(-2.0, 5.0), c(0.0, -0.7)] {
        assert!((quadratic_differential_at(&h, z).unwrap() - q[0]).norm() < 1e-10 * (1.0 + q[0].norm()));
    }
    // G_ℂ invariance
    let a = Mat2::new(c(1.1, 0.2), c(0.3, 0.0), c(-0.4, 0.1), re(0.0));
    let a = a.scale(a.det().sqrt().inv());
    let g = GroupElt::new(a, vec![c(1.5, 0.5), c(0.7, -0.2), c(2.0, 0.0), c(0.1, 1.0)]).unwrap();
    let moved = to_higgs(&act(&g, &rep).unwrap(), &p, &b, 0.1, &tol()).unwrap();
    assert!((det_phi(&moved).unwrap()[0] - q[0]).norm() < 1e-10);

    let y0 = QuiverRep { x: rep.x.clone(), y: vec![Covec2::zero(); 4] };
    assert_eq!(det_phi(&to_higgs(&y0, &p, &b, 0.1, &tol()).unwrap()).unwrap()[0], re(0.0));

    // n = 6: two coefficients, q(z) a polynomial of degree ≤ 2
    let b6 = weights(&sample::beta(&mut rng, 6, 0.01));
    let h6 = to_higgs(&sample::hyperpolygon(&mut rng, 6), &default_punctures(6), &b6, 0.05, &tol()).unwrap();
    let q6 = det_phi(&h6).unwrap();
    assert_eq!(q6.len(), 3);
    let z = c(0.4, -1.3);
    let poly = q6[0] + q6[1] * z + q6[2] * z * z;
    assert!((poly - quadratic_differential_at(&h6, z).unwrap()).norm() < 1e-9);
}

// y_i = c_i(−x_{i2}, x_{i1}) with c the cofactor vector of the 3×4 system, holomorphic in x.
fn holomorphic_hyperpolygon(x: &[Vec2<f64>]) -> QuiverRep<f64> {
    let perp: Vec<Covec2<f64>> = x.iter().map(|v| Covec2([-v.0[1], v.0[0]])).collect();
    let rows: Vec<[C<f64>; 3]> = x.iter().zip(&perp).map(|(v, p)| {
        let m = v.outer(p);
        [m.0[0][0], m.0[0][1], m.0[1][0]]
    }).collect();
    let det3 = |a: [C<f64>; 3], b: [C<f64>; 3], d: [C<f64>; 3]| {
        a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0]) + a[2] * (b[0] * d[1] - b[1] * d[0])
    };
    let cof = [
        det3(rows[1], rows[2], rows[3]),
        -det3(rows[0], rows[2], rows[3]),
        det3(rows[0], rows[1], rows[3]),
        -det3(rows[0], rows[1], rows[2]),
    ];
    QuiverRep { x: x.to_vec(), y: perp.iter().zip(cof).map(|(p, k)| p.scale(k)).collect() }
}

#[test]
fn nilpotent_cone_components() {
    let b = weights(&[1.0, 1.1, 1.25, 1.4]);
    let p = default_punctures(4);
    let r = 0.1 * r_max(&b);
    let alpha = alpha_of(&b, r).unwrap();
    let base = ParabolicHiggs {
        p: p.clone(),
        phi: vec![Mat2::zero(); 4],
        flags: vec![Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0), Vec2::real(0.6, 0.8), Vec2::real(0.8, -0.6)],
        alpha,
    };
    assert_eq!(nilpotent_component(&base, &tol()), Ok(NilpotentComponent::CentralSphere));

    let mut pair = base.clone();
    pair.flags[1] = pair.flags[0];
    pair.phi[0] = Mat2::real(0.0, 0.7, 0.0, 0.0);
    pair.phi[1] = Mat2::real(0.0, -0.7, 0.0, 0.0);
    assert_eq!(nilpotent_component(&pair, &tol()), Ok(NilpotentComponent::ExteriorPair(vec![0, 1])));

    // move x₄ along a complex line until det φ = 0 (secant on a holomorphic function);
    // some roots have y vanishing on a pair, so retry until all four residues survive
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let rep = (0..50)
        .find_map(|_| {
            let x: Vec<Vec2<f64>> = (0..4).map(|_| sample::vec2(&mut rng)).collect();
            let w = sample::vec2(&mut rng);
            let q = |t: C<f64>| {
                let mut xs = x.clone();
                xs[3] = xs[3] + w.scale(t);
                let rep = holomorphic_hyperpolygon(&xs);
                let h = ParabolicHiggs { phi: (0..4).map(|i| xs[i].outer(&rep.y[i])).collect(), ..base.clone() };
                (quadratic_differential_at(&h, c(0.13, 0.21)).unwrap(), rep)
            };
            let (mut t0, mut t1) = (re(0.0), re(0.1));
            let (mut q0, _) = q(t0);
            for _ in 0..60 {
                let (q1, _) = q(t1);
                if q1.norm() < 1e-15 || q1 == q0 {
                    break;
                }
                let t2 = t1 - q1 * (t1 - t0) / (q1 - q0);
                (t0, q0, t1) = (t1, q1, t2);
            }
            let (_, rep) = q(t1);
            let scale = rep.y.iter().fold(0.0f64, |a, y| a.max(y.norm()));
            let rep = QuiverRep { x: rep.x, y: rep.y.iter().map(|y| y.scale(re(1.0 / scale))).collect() };
            rep.y.iter().all(|y| y.norm() > 1e-2).then_some(rep)
        })
        .unwrap();
    let h = to_higgs(&rep, &p, &b, r, &tol()).unwrap();
    assert!(det_phi(&h).unwrap()[0].norm() < 1e-10);
    assert_eq!(nilpotent_component(&h, &tol()), Ok(NilpotentComponent::DistinguishedExterior));

    // off the cone
    let generic = to_higgs(&sample::hyperpolygon(&mut rng, 4), &p, &b, r, &tol()).unwrap();
    assert_eq!(nilpotent_component(&generic, &tol()), Err(Error::NotNilpotent(0)));
}

#[test]
fn biswas_examples() {
    let t = tol();
    assert_eq!(biswas_membership(&[0.4, 0.4, 0.4, 0.4], &t).map(|r| r.0), Ok(true));
    assert_eq!(biswas_membership(&[0.45, 0.45, 0.45, 0.02], &t).map(|r| r.0), Ok(false));
    assert_eq!(biswas_membership(&[0.4, 0.4, 0.4], &t), Err(Error::UnsupportedN(3)));
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let b = weights(&sample::beta(&mut rng, 4, 0.01));
        for f in [0.3, 0.1, 0.01, 1e-4] {
            let a = alpha_of(&b, f * r_max(&b)).unwrap();
            assert!(biswas_membership(&a.alpha, &t).unwrap().0);
            assert!(chamber_correspondence(&b, f * r_max(&b), &t).unwrap());
        }
    }
}

#[test]
fn morse_values() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let rep = sample::hyperpolygon(&mut ChaCha8Rng::seed_from_u64(18), 4);
    let y0 = QuiverRep { x: rep.x.clone(), y: vec![Covec2::zero(); 4] };
    assert_eq!(morse_hp(&y0, &b, &tol()), Ok(0.0));
    assert_eq!(morse_hp(&rep, &b, &tol()), Err(Error::NotFixedPoint));

    let fp = x12_fixed_point(&b);
    assert!((morse_hp(&fp, &b, &tol()).unwrap() - 0.5).abs() < 1e-12);
    assert!((morse_hp_direct(&fp) - 0.5).abs() < 1e-8);

    let alpha = alpha_of(&b, 0.1).unwrap();
    assert!((morse_hitchin_fixed(subset_from(&[0, 1]), 0, &alpha) - PI).abs() < 1e-12);
    assert_eq!(morse_hitchin_fixed(0, 0, &alpha), 0.0);
}

#[test]
fn fixed_point_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut betas = vec![vec![1.0, 1.0, 1.0, 2.0]];
    betas.extend((0..10).map(|_| sample::beta(&mut rng, 4, 0.01)));
    for bv in betas {
        let b = weights(&bv);
        let rm = r_max(&b);
        for k in 1..=20 {
            let alpha = alpha_of(&b, rm * k as f64 / 21.0).unwrap();
            for s in 1u32..16 {
                if w_sum(s, &b) >= 0.0 {
                    continue;
                }
                let hp = -w_sum(s, &b) / 2.0;
                assert!((morse_hitchin_fixed(s, 0, &alpha) - TAU * hp).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn torelli_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let rows = torelli_table(&b, 0.05).unwrap();
    assert!(!rows.is_empty());
    for row in &rows {
        assert!((row.ratio - TAU).abs() < 1e-12);
        assert_eq!(row.tau_hp[1..], [0.0, 0.0]);
        assert_eq!(row.tau_hitchin[1..], [0.0, 0.0]);
    }
    let r12 = rows.iter().find(|r| r.subset == 0b0011).unwrap();
    assert!((r12.tau_hp[0] - PI).abs() < 1e-12);

    // permuting β permutes rows
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let bv = sample::beta(&mut rng, 4, 0.01);
    let perm = [2usize, 0, 3, 1];
    let pb: Vec<f64> = perm.iter().map(|&k| bv[k]).collect();
    let r1 = torelli_table(&weights(&bv), 0.05).unwrap();
    let r2 = torelli_table(&weights(&pb), 0.05).unwrap();
    assert_eq!(r1.len(), r2.len());
    for row in &r2 {
        let orig = (0..4).filter(|&i| row.subset >> i & 1 == 1).fold(0u32, |m, i| m | 1 << perm[i]);
        let m = r1.iter().find(|r| r.subset == orig).unwrap();
        assert!((m.tau_hp[0] - row.tau_hp[0]).abs() < 1e-12);
    }
    assert_eq!(torelli_table(&weights(&[1.0, 1.1, 1.3]), 0.05), Err(Error::UnsupportedN(3)));
}
