use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::spectra::{crossing_at, real_eigenvalues, trace_branch};

const PI2: f64 = PI * PI;
const PI4: f64 = PI2 * PI2;

fn t1() -> PotentialPair {
    PotentialPair::constant(9.0 * PI2, 4.0 * PI2, 1.0)
}
fn t2() -> PotentialPair {
    PotentialPair::constant(2.0 * PI2, 4.0 * PI2, 1.0)
}
fn t3() -> PotentialPair {
    PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts() -> SpectraOptions {
    SpectraOptions::default()
}

/// Second derivative at 0 of an even curve with `s(0) = 1`, from traced
/// points at `δ` and `δ/2`, Richardson extrapolated.
fn fd_concavity(p: &PotentialPair, bracket: [f64; 2], delta: f64) -> f64 {
    let s = trace_branch(p, &[delta, delta / 2.0], bracket, Tolerance::default()).unwrap();
    let d1 = 2.0 * (s[0].unwrap() - 1.0) / (delta * delta);
    let d2 = 2.0 * (s[1].unwrap() - 1.0) / (delta * delta / 4.0);
    (4.0 * d2 - d1) / 3.0
}

#[test]
fn lminus_kernel_forms_and_concavity() {
    let p = t2();
    let c = crossing_at(&p, 0.0, 1.0, &opts()).unwrap();
    let ms = crossing_form_s(&c, &p).unwrap();
    assert!(rel(ms.get(0, 0), 8.0 * PI2) < 1e-9);
    assert_eq!(ms.signature, 1);
    let integral = crossing_form_s_integral(&c, &p)[(0, 0)];
    assert!(rel(integral, 8.0 * PI2) < 1e-9);
    assert!(crossing_form_lambda(&c).unwrap().is_zero());
    assert_eq!(crossing_form_lambda(&c).unwrap().get(0, 0), 0.0);

    let m2 = second_order_form(&c, &p).unwrap();
    assert!(rel(m2.form.get(0, 0), -1.0 / PI2) < 1e-9);
    assert_eq!(m2.form.n_minus, 1);
    assert!(rel(m2.integrals[0], 1.0 / (2.0 * PI2)) < 1e-9);

    let conc = concavity(&c, &p).unwrap();
    assert!(rel(conc.sddot[0], 1.0 / (8.0 * PI4)) < 1e-9);
    assert_eq!(conc.s_sharp, vec![Some(1)]);
    assert_eq!(correction_term(Some(&c), Some(&conc)).unwrap(), 0);

    let fd = fd_concavity(&p, [1.0, 1.01], 0.5);
    assert!(rel(fd, conc.sddot[0]) < 1e-3, "{fd} vs {}", conc.sddot[0]);
}

#[test]
fn double_kernel_forms_and_concavities() {
    let p = t1();
    let c = crossing_at(&p, 0.0, 1.0, &opts()).unwrap();
    assert_eq!(c.kernel_dim, 2);
    let ms = crossing_form_s(&c, &p).unwrap();
    assert!(rel(ms.get(0, 0), -18.0 * PI2) < 1e-9);
    assert!(rel(ms.get(1, 1), 8.0 * PI2) < 1e-9);
    assert_eq!(ms.get(0, 1), 0.0);
    assert_eq!(ms.signature, 0);
    assert!(crossing_form_lambda(&c).unwrap().is_zero());

    let m2 = second_order_form(&c, &p).unwrap();
    assert!(rel(m2.form.get(0, 0), 2.0 / (5.0 * PI2)) < 1e-9);
    assert!(rel(m2.form.get(1, 1), 2.0 / (5.0 * PI2)) < 1e-9);
    assert_eq!(m2.form.n_minus, 0);

    let conc = concavity(&c, &p).unwrap();
    assert!(rel(conc.sddot[0], 1.0 / (45.0 * PI4)) < 1e-9);
    assert!(rel(conc.sddot[1], -1.0 / (20.0 * PI4)) < 1e-9);
    assert_eq!(conc.s_sharp, vec![Some(1), Some(-1)]);
    assert_eq!(correction_term(Some(&c), Some(&conc)).unwrap(), 1);

    let up = fd_concavity(&p, [1.0 + 1e-12, 1.01], 1.0);
    let down = fd_concavity(&p, [0.99, 1.0 - 1e-12], 1.0);
    assert!(rel(up, conc.sddot[0]) < 1e-3, "{up}");
    assert!(rel(down, conc.sddot[1]) < 1e-3, "{down}");
}

#[test]
fn regular_crossing_has_positive_lambda_form() {
    let p = t3();
    let roots = real_eigenvalues(&p, 1.0, [0.0, 50.0], &opts()).unwrap();
    assert_eq!(roots.len(), 1);
    let ml = crossing_form_lambda(&roots[0]).unwrap();
    assert_eq!(ml.signature, 1);
    // Kernel ∝ (sin πx, -√2 sin πx): -2⟨u, v⟩ = 2√2/3 after normalization.
    assert!(rel(ml.get(0, 0), 2.0 * 2f64.sqrt() / 3.0) < 1e-8);
}

#[test]
fn hadamard_slope_matches_closed_form_curve() {
    let p = t3();
    let lam = |s: f64| ((2.0 * s * s - 1.0) * (1.0 - s * s / 2.0)).sqrt() * PI2 / (s * s);
    for s0 in [0.75, 0.85, 0.95] {
        let c = &real_eigenvalues(&p, s0, [0.1, 50.0], &opts()).unwrap()[0];
        let h = 1e-5;
        let dlds = (lam(s0 + h) - lam(s0 - h)) / (2.0 * h);
        let slope = hadamard_slope(c, &p).unwrap();
        assert!(rel(slope, 1.0 / dlds) < 1e-6, "{slope} vs {}", 1.0 / dlds);
    }
}

#[test]
fn inhomogeneous_solutions() {
    let n = 1024;
    let sin = |k: f64| GridFn::from_fn(1.0, n, move |x| ((k * PI * x).sin(), k * PI * (k * PI * x).cos()));
    let w = solve_inhomogeneous(&Scalar::constant(2.0 * PI2), Convention::LplusEq, &sin(2.0)).unwrap();
    let exact = sin(2.0).scaled(1.0 / (2.0 * PI2));
    assert!(w.axpy(-1.0, &exact).sup_norm() < 1e-12);
    assert!((0..=n).all(|i| (w.der[i] - exact.der[i]).abs() < 1e-11));

    let w = solve_inhomogeneous(&Scalar::constant(4.0 * PI2), Convention::MinusLminusEq, &sin(3.0)).unwrap();
    let exact = sin(3.0).scaled(-1.0 / (5.0 * PI2));
    assert!(w.axpy(-1.0, &exact).sup_norm() < 1e-12);

    // Resonant operator: orthogonal right-hand side gives the solution orthogonal to the kernel.
    let w = solve_inhomogeneous(&Scalar::constant(4.0 * PI2), Convention::LplusEq, &sin(3.0)).unwrap();
    let exact = sin(3.0).scaled(1.0 / (5.0 * PI2));
    assert!(w.axpy(-1.0, &exact).sup_norm() < 1e-10);
    assert!(w.dot(&sin(2.0)).abs() < 1e-12);

    let ramp = GridFn::from_fn(1.0, n, |x| (x, 1.0));
    let err = solve_inhomogeneous(&Scalar::constant(4.0 * PI2), Convention::LplusEq, &ramp).unwrap_err();
    assert!(matches!(err, Error::Fredholm { .. }));
}

#[test]
fn inhomogeneous_solution_satisfies_the_equation() {
    let q = Scalar::polynomial(vec![5.0, -3.0, 8.0]);
    let n = 2048;
    let f = GridFn::from_fn(1.5, n, |x| ((x * 2.0).exp() - 1.0, 2.0 * (x * 2.0).exp()));
    let w = solve_inhomogeneous(&q, Convention::LplusEq, &f).unwrap();
    assert!(w.val[0].abs() < 1e-14 && w.val[n].abs() < 1e-12);
    // -w'' - q w = f, with w'' from the sampled derivative.
    let d2 = grid::differentiate(&w.der, w.step(), 4);
    for i in (50..n - 50).step_by(101) {
        let res = -d2[i] - q.value(w.x(i)) * w.val[i] - f.val[i];
        assert!(res.abs() < 1e-7, "residual {res} at {i}");
    }
}

#[test]
fn box_identities_for_constant_families() {
    let b = maslov_box(&t1()).unwrap();
    assert_eq!((b.p, b.q, b.corner_c, b.lower_bound), (2, 1, 1, 0));
    assert_eq!(b.gamma2_index, -1);
    assert_eq!(b.gamma2_index + b.corner_c + b.gamma3_index, 0);
    assert_eq!(b.arrival_check, Some((0, 0)));
    assert_eq!(b.gamma3_recount, Some(0));

    let b = maslov_box(&t2()).unwrap();
    assert_eq!((b.p, b.q, b.corner_c, b.lower_bound), (1, 1, 0, 0));
    assert_eq!(b.arrival_check, Some((-1, -1)));

    let b = maslov_box(&t3()).unwrap();
    assert_eq!((b.p, b.q, b.corner_c, b.lower_bound), (1, 0, 0, 1));
    assert_eq!(b.gamma3_recount, Some(1));
    assert_eq!(b.positive_real_eigenvalues.len(), 1);

    let b = maslov_box(&PotentialPair::free(1.0)).unwrap();
    assert_eq!((b.p, b.q, b.corner_c, b.lower_bound), (0, 0, 0, 0));
}

#[test]
fn isolated_double_kernel_has_no_corner_term() {
    // Both operators share the kernel sin 2πx, so ⟨u₁, v₂⟩ ≠ 0.
    let p = PotentialPair::constant(4.0 * PI2, 4.0 * PI2, 1.0);
    let c = crossing_at(&p, 0.0, 1.0, &opts()).unwrap();
    let conc = concavity(&c, &p).unwrap();
    assert!(conc.isolated);
    assert_eq!(correction_term(Some(&c), Some(&conc)).unwrap(), 0);
}

#[test]
fn unresolved_corner_reports_interval() {
    let c = crossing_at(&t2(), 0.0, 1.0, &opts()).unwrap();
    let mut conc = concavity(&c, &t2()).unwrap();
    conc.s_sharp = vec![None];
    let err = correction_term(Some(&c), Some(&conc)).unwrap_err();
    assert!(matches!(err, Error::UnresolvedCorner { lo: 0, hi: 1 }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn s_form_sign_follows_kernel_component(a in 20.0f64..120.0, b in -20.0f64..20.0, c in -30.0f64..30.0) {
        let g = Scalar::polynomial(vec![a, b, c]);
        let h = Scalar::polynomial(vec![0.6 * a, -b, 0.5 * c]);
        let p = PotentialPair::explicit(g.clone(), h.clone(), 1.0, "poly");
        for (q, expect) in [(&g, -1), (&h, 1)] {
            for s0 in spectra::conjugate_points(q, 1.0).unwrap().interior {
                let cr = crossing_at(&p, 0.0, s0, &opts()).unwrap();
                if cr.kernel_dim != 1 {
                    continue;
                }
                let ms = crossing_form_s(&cr, &p).unwrap();
                prop_assert_eq!(ms.signature, expect);
                let integral = crossing_form_s_integral(&cr, &p)[(0, 0)];
                prop_assert!((integral - ms.get(0, 0)).abs() < 1e-7 * ms.get(0, 0).abs());
            }
        }
    }
}
