use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;

const PI2: f64 = PI * PI;

/// Real eigenvalue of mode `k` for constant potentials, if any:
/// `λ² = -μ₊ μ₋ / s⁴` with `μ± = (kπ/ℓ)² - s² c±`.
fn constant_mode(cg: f64, ch: f64, ell: f64, s: f64, k: usize) -> f64 {
    let w = (k as f64 * PI / ell).powi(2);
    -(w - s * s * cg) * (w - s * s * ch) / s.powi(4)
}

#[test]
fn free_case_determinant() {
    let p = PotentialPair::free(1.0);
    for s in [0.3, 1.0] {
        let d = char_det(&p, 0.0, s).unwrap();
        assert!((d + s * s).abs() < 1e-12, "{d}");
    }
}

#[test]
fn real_roots_for_single_unstable_mode() {
    let p = PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0);
    for s in [1.0, 0.8] {
        let roots = real_eigenvalues(&p, s, [-10.0, 10.0], &SpectraOptions::default()).unwrap();
        let exact = constant_mode(2.0 * PI2, 0.5 * PI2, 1.0, s, 1).sqrt();
        assert_eq!(roots.len(), 2, "{:?}", roots.iter().map(|c| c.lambda0).collect::<Vec<_>>());
        assert!((roots[0].lambda0 + exact).abs() < 1e-8 * exact);
        assert!((roots[1].lambda0 - exact).abs() < 1e-8 * exact);
        for c in &roots {
            assert_eq!(c.which_kernel, WhichKernel::Coupled);
            assert_eq!(c.kernel_dim, 1);
            assert!((c.kernel[0].norm_sq() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn zero_root_with_lminus_kernel() {
    let p = PotentialPair::constant(2.0 * PI2, 4.0 * PI2, 1.0);
    let roots = real_eigenvalues(&p, 1.0, [-5.0, 5.0], &SpectraOptions::default()).unwrap();
    assert_eq!(roots.len(), 1);
    let c = &roots[0];
    assert_eq!(c.lambda0, 0.0);
    assert_eq!(c.which_kernel, WhichKernel::Lminus);
    // v ∝ sin 2πx and u ≡ 0.
    let v = &c.kernel[0].v;
    assert!(c.kernel[0].u.sup_norm() == 0.0);
    let amp = 2f64.sqrt();
    for i in (0..=v.intervals()).step_by(97) {
        let x = v.x(i);
        assert!((v.val[i].abs() - amp * (2.0 * PI * x).sin().abs()).abs() < 1e-9);
    }
}

#[test]
fn double_kernel_at_zero() {
    let p = PotentialPair::constant(9.0 * PI2, 4.0 * PI2, 1.0);
    let roots = real_eigenvalues(&p, 1.0, [-3.0, 3.0], &SpectraOptions::default()).unwrap();
    assert_eq!(roots.len(), 1, "{:?}", roots.iter().map(|c| c.lambda0).collect::<Vec<_>>());
    assert_eq!(roots[0].kernel_dim, 2);
    assert_eq!(roots[0].which_kernel, WhichKernel::Both);
    let k = &roots[0].kernel;
    assert!(k[0].v.sup_norm() == 0.0 && k[1].u.sup_norm() == 0.0);
}

#[test]
fn conjugate_points_of_constant_potential() {
    let c = conjugate_points(&Scalar::constant(9.0 * PI2), 1.0).unwrap();
    assert_eq!(c.interior.len(), 2);
    assert!((c.interior[0] - 1.0 / 3.0).abs() < 1e-10);
    assert!((c.interior[1] - 2.0 / 3.0).abs() < 1e-10);
    assert!(c.endpoint);

    let c = conjugate_points(&Scalar::constant(2.0 * PI2), 1.0).unwrap();
    assert_eq!(c.interior.len(), 1);
    assert!((c.interior[0] - 0.5f64.sqrt()).abs() < 1e-10);
    assert!(!c.endpoint);
}

#[test]
fn conjugate_points_are_roots_of_the_rescaled_shooting() {
    // At each conjugate point the rescaled Dirichlet problem has a kernel.
    let q = Scalar::polynomial(vec![30.0, -10.0, 40.0]);
    let ell = 1.3;
    let c = conjugate_points(&q, ell).unwrap();
    assert!(!c.interior.is_empty());
    let w_end = |s: f64| {
        let rhs = |x: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -s * s * q.value(s * x) * y[0];
        };
        ode::integrate_to(rhs, 0.0, [0.0, 1.0], ell, Tolerance::default()).unwrap()[0]
    };
    for &s in &c.interior {
        assert!(w_end(s * (1.0 - 1e-6)) * w_end(s * (1.0 + 1e-6)) < 0.0, "no sign change at {s}");
    }
}

#[test]
fn morse_index_matches_finite_differences() {
    let q = Scalar::polynomial(vec![60.0, -35.0, 12.0]);
    for ell in [0.5, 1.0, 2.0, 3.0] {
        let m = morse_index(&q, ell).unwrap();
        let ev = fd_scalar_eigenvalues(&q, ell, 400, 12);
        let neg = ev.iter().filter(|&&e| e < 0.0).count();
        assert_eq!(m.count, neg, "ell={ell} eigenvalues {ev:?}");
    }
}

#[test]
fn scalar_oracle_eigenvalues() {
    let ev = fd_scalar_eigenvalues(&Scalar::constant(3.0), 2.0, 200, 4);
    for (k, e) in ev.iter().enumerate() {
        let exact = ((k + 1) as f64 * PI / 2.0).powi(2) - 3.0;
        assert!((e - exact).abs() < 1e-6 * exact.abs().max(1.0), "{e} vs {exact}");
    }
}

#[test]
fn oracle_free_spectrum() {
    let ev = fd_spectrum(&PotentialPair::free(1.0), 1.0, 200).unwrap();
    let upper: Vec<f64> = ev.iter().filter(|e| e.im > 0.0).map(|e| e.im).take(5).collect();
    for (k, w) in upper.iter().enumerate() {
        let exact = ((k + 1) as f64 * PI).powi(2);
        assert!((w - exact).abs() < 1e-4 * exact, "{w} vs {exact}");
        assert!(ev.iter().all(|e| e.re.abs() < 1e-9));
    }
}

#[test]
fn oracle_real_pair_and_krein_sign() {
    let p = PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0);
    let ev = fd_spectrum(&p, 1.0, 200).unwrap();
    let real: Vec<f64> = ev.iter().filter(|e| e.is_real(1e-9)).map(|e| e.re).collect();
    assert_eq!(real.len(), 2);
    let exact = PI2 / 2f64.sqrt();
    assert!((real[1] - exact).abs() < 1e-4 * exact);

    let p = PotentialPair::constant(9.0 * PI2, 4.0 * PI2, 1.0);
    let ev = fd_spectrum(&p, 1.0, 200).unwrap();
    let w = (24.0f64).sqrt() * PI2;
    let e = ev.iter().find(|e| (e.im - w).abs() < 1e-3 * w).expect("imaginary mode one");
    assert!(e.krein.unwrap() < 0.0);
    // Higher imaginary modes with both μ± positive have positive Krein value.
    let w4 = ((16.0 - 9.0) * (16.0 - 4.0) as f64).sqrt() * PI2;
    let e4 = ev.iter().find(|e| (e.im - w4).abs() < 1e-3 * w4).expect("imaginary mode four");
    assert!(e4.krein.unwrap() > 0.0);
}

#[test]
fn oracle_agrees_with_shooting_off_unit_scale() {
    let p = PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0);
    let s = 0.85;
    let shot = real_eigenvalues(&p, s, [-10.0, 10.0], &SpectraOptions::default()).unwrap();
    let ev = fd_spectrum(&p, s, 200).unwrap();
    let real: Vec<f64> = ev.iter().filter(|e| e.is_real(1e-9)).map(|e| e.re).collect();
    assert_eq!(real.len(), shot.len());
    for (a, b) in real.iter().zip(&shot) {
        assert!((a - b.lambda0).abs() < 1e-4 * a.abs());
    }
}

#[test]
fn traced_curve_follows_closed_form() {
    let p = PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0);
    let rect = Rect { lambda: [-8.0, 8.0], s: [0.3, 1.0] };
    let opts = CurveOptions { n_lambda: 60, n_s: 60, ..Default::default() };
    let curves = trace_curves(&p, rect, &opts).unwrap();
    assert_eq!(curves.len(), 1);
    let c = &curves[0];
    assert!(!c.closed);
    for &[l, s] in &c.points {
        let exact = constant_mode(2.0 * PI2, 0.5 * PI2, 1.0, s, 1).max(0.0).sqrt();
        assert!((l.abs() - exact).abs() < 1e-7 * (1.0 + exact), "({l}, {s}) vs {exact}");
    }
    // One turning point at the bottom of the curve, near (0, 1/√2).
    assert_eq!(c.tangency_flags.len(), 1);
    let [l, s] = c.points[c.tangency_flags[0]];
    assert!(l.abs() < 0.6 && (s - 0.5f64.sqrt()).abs() < 0.02);
}

#[test]
fn branch_tracing_in_s() {
    let p = PotentialPair::constant(2.0 * PI2, 0.5 * PI2, 1.0);
    let lams = [1.0, 2.0, 4.0];
    let s = trace_branch(&p, &lams, [0.7072, 1.0], Tolerance::default()).unwrap();
    for (l, s) in lams.iter().zip(&s) {
        let s = s.unwrap();
        let exact = constant_mode(2.0 * PI2, 0.5 * PI2, 1.0, s, 1).sqrt();
        assert!((l - exact).abs() < 1e-9 * l);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn determinant_is_even_in_lambda(l in 0.1f64..20.0, s in 0.2f64..1.0, a in 0.0f64..40.0, b in -20.0f64..20.0) {
        let p = PotentialPair::explicit(
            Scalar::polynomial(vec![a, b, 5.0]),
            Scalar::polynomial(vec![b, a, -3.0]),
            1.0,
            "poly",
        );
        let (d1, scale) = char_det_scaled(&p, l, s, Tolerance::default()).unwrap();
        let d2 = char_det(&p, -l, s).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-9 * scale);
    }
}
