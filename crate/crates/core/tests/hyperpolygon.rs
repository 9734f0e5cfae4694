use hyperpolygon::hyperpolygon::{
    act, is_stable, mu_complex, mu_real, polygon_view, straight_subsets, subset_from, unitarize, w_sum, BetaWeights, GroupElt, QuiverRep,
    UnitarizeOpts,
};
use hyperpolygon::mat2::{c, re, traceless, Covec2, Mat2, Vec2, C};
use hyperpolygon::{sample, Error, Tol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tol<f64> {
    Tol::default()
}

fn weights(b: &[f64]) -> BetaWeights<f64> {
    BetaWeights::new(b.to_vec(), &tol()).unwrap()
}

fn v(a: f64, b: f64) -> Vec2<f64> {
    Vec2::real(a, b)
}

// Scalar-loop oracles, written without the Mat2 helpers.
fn mu_complex_loops(rep: &QuiverRep<f64>) -> ([[C<f64>; 2]; 2], Vec<C<f64>>) {
    let mut m = [[re(0.0); 2]; 2];
    let mut s = vec![];
    for i in 0..rep.n() {
        let (x, y) = (rep.x[i].0, rep.y[i].0);
        for r in 0..2 {
            for k in 0..2 {
                m[r][k] += x[r] * y[k];
            }
        }
        s.push(y[0] * x[0] + y[1] * x[1]);
    }
    let h = (m[0][0] + m[1][1]) * 0.5;
    m[0][0] -= h;
    m[1][1] -= h;
    (m, s)
}

fn brute_force_stable(rep: &QuiverRep<f64>, beta: &[f64]) -> bool {
    let n = rep.n();
    if rep.x.iter().any(|x| x.norm() < 1e-12) {
        return false;
    }
    let par = |i: usize, j: usize| {
        let (a, b) = (rep.x[i].0, rep.x[j].0);
        (a[0] * b[1] - a[1] * b[0]).norm() <= 1e-9 * rep.x[i].norm() * rep.x[j].norm()
    };
    for s in 0u32..1 << n {
        let inside = |i: usize| s >> i & 1 == 1;
        let straight = (0..n).all(|i| (0..n).all(|j| !(inside(i) && inside(j)) || par(i, j)));
        let y_off = (0..n).all(|i| inside(i) || rep.y[i].norm() <= 1e-9);
        let w: f64 = (0..n).map(|i| if inside(i) { beta[i] } else { -beta[i] }).sum();
        if straight && y_off && w > 0.0 {
            return false;
        }
    }
    true
}

#[test]
fn mu_complex_examples() {
    let rep = QuiverRep::new(vec![v(1.0, 0.0)], vec![Covec2::real(0.0, 1.0)]).unwrap();
    let (m, s) = mu_complex(&rep);
    assert_eq!(m, Mat2::real(0.0, 1.0, 0.0, 0.0));
    assert_eq!(s, vec![re(0.0)]);

    let zero_y = QuiverRep::new(vec![v(1.0, 2.0), v(0.0, 1.0), v(3.0, 1.0)], vec![Covec2::zero(); 3]).unwrap();
    let (m, s) = mu_complex(&zero_y);
    assert_eq!(m, Mat2::zero());
    assert!(s.iter().all(|z| *z == re(0.0)));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let n = rng.gen_range(3..8);
        let rep = QuiverRep { x: (0..n).map(|_| sample::vec2(&mut rng)).collect(), y: (0..n).map(|_| sample::covec2(&mut rng)).collect() };
        let (m, s) = mu_complex(&rep);
        let (mo, so) = mu_complex_loops(&rep);
        assert!((m - Mat2(mo)).max_abs() < 1e-14);
        assert!(s.iter().zip(&so).all(|(a, b)| (a - b).norm() < 1e-14));
    }
}

#[test]
fn mu_real_examples() {
    // x_i = √(2β_i)(cos θ_i, sin θ_i) with Σ(x_i x_i†)^⊥ = 0: angles 0, 60°, 120° and equal β
    let beta: f64 = 0.7;
    let x = (0..3)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            v((2.0 * beta).sqrt() * t.cos(), (2.0 * beta).sqrt() * t.sin())
        })
        .collect();
    let rep = QuiverRep::new(x, vec![Covec2::zero(); 3]).unwrap();
    let (m, s) = mu_real(&rep);
    assert!(m.max_abs() < 1e-15);
    assert!(s.iter().all(|si| (si - beta).abs() < 1e-15));

    let (m, s) = mu_real(&QuiverRep::<f64>::new(vec![Vec2::zero(); 3], vec![Covec2::zero(); 3]).unwrap());
    assert_eq!(m, Mat2::zero());
    assert!(s.iter().all(|&si| si == 0.0));

    // loop oracle: (i/2) traceless(Σ xx† − y†y), (|x|² − |y|²)/2
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rep = sample::hyperpolygon(&mut rng, 5);
    let (m, s) = mu_real(&rep);
    let mut h = [[re(0.0); 2]; 2];
    for i in 0..5 {
        let (x, y) = (rep.x[i].0, rep.y[i].0);
        for r in 0..2 {
            for k in 0..2 {
                h[r][k] += x[r] * x[k].conj() - y[r].conj() * y[k];
            }
        }
        let si = (x[0].norm_sqr() + x[1].norm_sqr() - y[0].norm_sqr() - y[1].norm_sqr()) / 2.0;
        assert!((s[i] - si).abs() < 1e-14);
    }
    let expect = traceless(&Mat2(h)).scale(c(0.0, 0.5));
    assert!((m - expect).max_abs() < 1e-14);
}

#[test]
fn w_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    assert_eq!(w_sum(0b1111, &b), 5.0);
    assert_eq!(w_sum(0, &b), -5.0);
    assert_eq!(w_sum(subset_from(&[0, 1]), &b), -1.0);
}

#[test]
fn beta_weights_reject_walls() {
    assert!(matches!(BetaWeights::new(vec![1.0, 1.0, 1.0, 1.0], &tol()), Err(Error::WallWeights(_))));
    assert!(BetaWeights::new(vec![1.0, -1.0, 1.0], &tol()).is_err());
}

#[test]
fn straight_subset_examples() {
    let same = QuiverRep::new(vec![v(1.0, 2.0); 4], vec![Covec2::zero(); 4]).unwrap();
    assert_eq!(straight_subsets(&same, 1e-9).unwrap(), vec![0b1111]);

    let generic = QuiverRep::new(vec![v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, -1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert_eq!(straight_subsets(&generic, 1e-9).unwrap(), vec![1, 2, 4, 8]);

    let mixed = QuiverRep::new(vec![v(1.0, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert_eq!(straight_subsets(&mixed, 1e-9).unwrap(), vec![0b0011, 0b0100, 0b1000]);

    let zero = QuiverRep::new(vec![v(1.0, 0.0), Vec2::zero(), v(0.0, 1.0)], vec![Covec2::zero(); 3]).unwrap();
    assert_eq!(straight_subsets(&zero, 1e-9), Err(Error::ZeroVector(1)));
}

#[test]
fn stability_examples() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let generic = QuiverRep::new(vec![v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, -1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert!(is_stable(&generic, &b, &tol()).unwrap());
    assert!(brute_force_stable(&generic, b.as_slice()));

    let with_zero = QuiverRep::new(vec![v(1.0, 0.0), Vec2::zero(), v(1.0, 1.0), v(1.0, -1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert!(!is_stable(&with_zero, &b, &tol()).unwrap());

    let straight = QuiverRep::new(vec![v(1.0, 0.0), v(2.0, 0.0), v(-1.0, 0.0), v(1.0, 1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert!(!is_stable(&straight, &b, &tol()).unwrap());
    assert!(!brute_force_stable(&straight, b.as_slice()));

    let off_shell = QuiverRep::new(vec![v(1.0, 0.0); 4], vec![Covec2::real(1.0, 0.0); 4]).unwrap();
    assert!(matches!(is_stable(&off_shell, &b, &tol()), Err(Error::NotAHyperpolygon(_))));
}

#[test]
fn stability_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut unstable = 0;
    for n in 3..=8 {
        for _ in 0..150 {
            let b = weights(&sample::beta(&mut rng, n, 1e-3));
            let rep = sample::structured_rep(&mut rng, n);
            let fast = is_stable(&rep, &b, &tol()).unwrap();
            assert_eq!(fast, brute_force_stable(&rep, b.as_slice()), "{rep:?} {b:?}");
            unstable += !fast as usize;
        }
    }
    // the generator has to exercise both outcomes
    assert!(unstable > 100);
}

#[test]
fn act_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rep = sample::hyperpolygon(&mut rng, 4);
    assert_eq!(act(&GroupElt::identity(4), &rep).unwrap(), rep);

    let g = GroupElt::new(Mat2::identity(), vec![re(2.0); 4]).unwrap();
    let out = act(&g, &rep).unwrap();
    for i in 0..4 {
        assert!((out.x[i] - rep.x[i].scale(re(0.5))).norm() < 1e-15);
        assert!((out.y[i] - rep.y[i].scale(re(2.0))).norm() < 1e-15);
    }
    let (m0, s0) = mu_complex(&rep);
    let (m1, s1) = mu_complex(&out);
    assert!((m0 - m1).max_abs() < 1e-14);
    assert!(s0.iter().zip(&s1).all(|(a, b)| (a - b).norm() < 1e-14));

    let bad = GroupElt { a: Mat2::identity(), t: vec![re(1.0), re(0.0), re(1.0), re(1.0)] };
    assert_eq!(act(&bad, &rep), Err(Error::SingularGroupElt));
    assert!(GroupElt::new(Mat2::identity().scale_re(2.0), vec![re(1.0); 4]).is_err());
}

fn invariants(rep: &QuiverRep<f64>) -> Vec<f64> {
    let n = rep.n();
    let mut out: Vec<f64> = rep.x.iter().map(|x| x.norm_sqr()).chain(rep.y.iter().map(|y| y.norm_sqr())).collect();
    for i in 0..n {
        for j in 0..n {
            let t = (rep.x[i].outer(&rep.y[i]) * rep.x[j].outer(&rep.y[j])).trace();
            out.extend([t.re, t.im]);
        }
    }
    out
}

#[test]
fn unitarize_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = UnitarizeOpts::default();
    for n in [4, 5, 6] {
        let b = weights(&sample::beta(&mut rng, n, 0.02));
        let rep0 = sample::hyperpolygon(&mut rng, n);
        let u = unitarize(&rep0, &b, &opts, &tol()).unwrap();
        let (m, s) = mu_real(&u);
        let res = s.iter().zip(b.as_slice()).fold(m.norm(), |a, (si, bi)| a.max((si - bi).abs()));
        assert!(res < 1e-10, "residual {res}");
        let (mc, sc) = mu_complex(&u);
        assert!(sc.iter().fold(mc.max_abs(), |a, z| a.max(z.norm())) < 1e-10);

        // already unitary: unchanged
        let again = unitarize(&u, &b, &opts, &tol()).unwrap();
        assert!(u.x.iter().zip(&again.x).all(|(a, b)| (*a - *b).norm() < 1e-9));

        // gauge translate: same invariants
        let a = Mat2::new(c(1.2, 0.3), c(0.4, -0.1), c(-0.2, 0.5), re(0.0));
        let a = a.scale(a.det().sqrt().inv());
        let g = GroupElt::new(a, (0..n).map(|_| c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0))).collect()).unwrap();
        let moved = unitarize(&act(&g, &u).unwrap(), &b, &opts, &tol()).unwrap();
        for (p, q) in invariants(&u).iter().zip(invariants(&moved)) {
            assert!((p - q).abs() < 1e-8);
        }

        // Σ (|x_i|² + |y_i|²) N_i = 0 with N_i = (x_i x_i†)^⊥ / |x_i|²
        let sum = (0..n).fold(Mat2::zero(), |acc, i| {
            let x = u.x[i];
            acc + traceless(&x.outer(&x.dagger())).scale_re((x.norm_sqr() + u.y[i].norm_sqr()) / x.norm_sqr())
        });
        assert!(sum.max_abs() < 1e-9);
    }
}

#[test]
fn unitarize_rejects_unstable() {
    let b = weights(&[1.0, 1.0, 1.0, 2.0]);
    let straight = QuiverRep::new(vec![v(1.0, 0.0), v(2.0, 0.0), v(-1.0, 0.0), v(1.0, 1.0)], vec![Covec2::zero(); 4]).unwrap();
    assert_eq!(unitarize(&straight, &b, &UnitarizeOpts::default(), &tol()), Err(Error::NotStable));
}

#[test]
fn polygon_view_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = weights(&sample::beta(&mut rng, 5, 0.02));
    let u = sample::unitary_rep(&mut rng, &b).unwrap();
    let pv = polygon_view(&u, &tol()).unwrap();
    let norm = |p: &[f64; 3]| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let mut closing = [0.0; 3];
    for i in 0..5 {
        for k in 0..3 {
            closing[k] += pv.v[i][k] - pv.w[i][k];
        }
        let s = [pv.v[i][0] + pv.w[i][0], pv.v[i][1] + pv.w[i][1], pv.v[i][2] + pv.w[i][2]];
        assert!((norm(&s) - 2f64.sqrt() * b.as_slice()[i]).abs() < 1e-10);
        assert!((norm(&pv.v[i]) - u.x[i].norm_sqr() / 2f64.sqrt()).abs() < 1e-12);
        assert!((norm(&pv.w[i]) - u.y[i].norm_sqr() / 2f64.sqrt()).abs() < 1e-12);
    }
    assert!(norm(&closing) < 1e-10);

    let y0 = QuiverRep::new(vec![v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0)], vec![Covec2::zero(); 3]).unwrap();
    assert!(polygon_view(&y0, &tol()).unwrap().w.iter().all(|w| *w == [0.0; 3]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_equivariance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = sample::hyperpolygon(&mut rng, 5);
        let a = sample::su2(&mut rng);
        let g = GroupElt::new(a, vec![re(1.0); 5]).unwrap();
        let (m0, s0) = mu_real(&rep);
        let (m1, s1) = mu_real(&act(&g, &rep).unwrap());
        prop_assert!((a * m0 * a.dagger() - m1).max_abs() < 1e-12);
        prop_assert!(s0.iter().zip(&s1).all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn stability_oracle(seed in any::<u64>(), n in 3usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = weights(&sample::beta(&mut rng, n, 1e-3));
        let rep = sample::structured_rep(&mut rng, n);
        prop_assert_eq!(is_stable(&rep, &b, &tol()).unwrap(), brute_force_stable(&rep, b.as_slice()));
    }

    #[test]
    fn unitarize_keeps_complex_level(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = weights(&sample::beta(&mut rng, 4, 0.02));
        let u = sample::unitary_rep(&mut rng, &b).unwrap();
        for i in 0..4 {
            prop_assert!((u.x[i].norm_sqr() - u.y[i].norm_sqr() - 2.0 * b.as_slice()[i]).abs() < 1e-9);
        }
        let (mc, _) = mu_complex(&u);
        prop_assert!(mc.max_abs() < 1e-10);
    }
}
