use hyperpolygon::mat2::{adjoint_wrt, c, re, trace_pairing, traceless, Herm2, Mat2};
use hyperpolygon::sample;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: &Mat2<f64>, b: &Mat2<f64>, tol: f64) -> bool {
    (*a - *b).max_abs() <= tol
}

#[test]
fn traceless_examples() {
    assert_eq!(traceless(&Mat2::<f64>::identity()), Mat2::zero());
    let d = Mat2::real(1.0, 0.0, 0.0, -1.0);
    assert_eq!(traceless(&d), d);
    assert_eq!(traceless(&Mat2::real(2.0, 1.0, 0.0, 0.0)), Mat2::real(1.0, 1.0, 0.0, -1.0));
}

#[test]
fn trace_pairing_examples() {
    let id = Mat2::<f64>::identity();
    assert_eq!(trace_pairing(&id, &id), re(2.0));
    let d = Mat2::real(1.0, 0.0, 0.0, -1.0);
    assert_eq!(trace_pairing(&d, &d), re(2.0));
    let e = Mat2::real(0.0, 1.0, 0.0, 0.0);
    assert_eq!(trace_pairing(&e, &e), re(1.0));
}

#[test]
fn adjoint_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = Mat2::new(sample::complex(&mut rng), sample::complex(&mut rng), sample::complex(&mut rng), sample::complex(&mut rng));
    assert!(close(&adjoint_wrt(&Herm2::identity(), &b).unwrap(), &b.dagger(), 1e-15));

    // h⁻¹B†h by hand for h = diag(λ, 1/λ), B = e₁₂
    let lam: f64 = 1.7;
    let h = Herm2::diag(lam, lam.recip());
    let got = adjoint_wrt(&h, &Mat2::real(0.0, 1.0, 0.0, 0.0)).unwrap();
    assert!(close(&got, &Mat2::real(0.0, 0.0, lam * lam, 0.0), 1e-14));

    // h-self-adjoint: B = h⁻¹K with K hermitian
    let k = Mat2::new(re(0.3), c(0.1, 0.4), c(0.1, -0.4), re(-0.8));
    let hinv = h.mat().inverse().unwrap();
    let bh = hinv * k;
    assert!(close(&adjoint_wrt(&h, &bh).unwrap(), &bh, 1e-14));
}

#[test]
fn adjoint_rejects_singular_metric() {
    let h = Herm2::diag(1e-200, 1e-200);
    assert!(adjoint_wrt(&h, &Mat2::<f64>::identity()).is_err());
}

#[test]
fn exp_of_diagonal() {
    let m = Mat2::diag(re(0.5), re(-0.5)).exp();
    assert!(close(&m, &Mat2::real(0.5f64.exp(), 0.0, 0.0, (-0.5f64).exp()), 1e-14));
    let n = Mat2::real(0.0, 1.0, 0.0, 0.0).exp();
    assert!(close(&n, &Mat2::real(1.0, 1.0, 0.0, 1.0), 1e-15));
}

fn arb_c() -> impl Strategy<Value = num_complex::Complex<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn arb_mat() -> impl Strategy<Value = Mat2<f64>> {
    (arb_c(), arb_c(), arb_c(), arb_c()).prop_map(|(a, b, cc, d)| Mat2::new(a, b, cc, d))
}

fn arb_pos_herm() -> impl Strategy<Value = Herm2<f64>> {
    arb_mat().prop_map(|m| Herm2::symmetrized(&(m.dagger() * m + Mat2::identity().scale_re(0.1))))
}

proptest! {
    #[test]
    fn traceless_idempotent_linear(a in arb_mat(), b in arb_mat(), s in arb_c()) {
        let t = traceless(&a);
        prop_assert!(t.trace().norm() <= 1e-15);
        prop_assert!(close(&traceless(&t), &t, 0.0));
        let lhs = traceless(&(a + b.scale(s)));
        let rhs = traceless(&a) + traceless(&b).scale(s);
        prop_assert!(close(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn pairing_is_frobenius(a in arb_mat()) {
        let p = trace_pairing(&a, &a);
        prop_assert!(p.im.abs() <= 1e-14);
        prop_assert!(p.re >= 0.0);
        prop_assert!((p.re - a.norm_sqr()).abs() <= 1e-13);
    }

    #[test]
    fn adjoint_is_involution(h in arb_pos_herm(), b in arb_mat()) {
        let once = adjoint_wrt(&h, &b).unwrap();
        let twice = adjoint_wrt(&h, &once).unwrap();
        let scale = 1.0 + b.max_abs();
        let cond = { let (l, u) = h.eigenvalues(); u / l };
        prop_assert!(close(&twice, &b, 1e-12 * scale * cond));
    }
}
