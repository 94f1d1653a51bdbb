use super::*;
use crate::waves::{elliptic_wave, solve_standing_wave, Branch, EllipticFamily, Nonlinearity};
use std::f64::consts::PI;

fn pi2() -> f64 {
    PI * PI
}

fn septic(ell: f64) -> StandingWave {
    let f = Nonlinearity::Power { p: 3.0 };
    solve_standing_wave(&f, -2.0, ell, Bc::Dirichlet, Branch { range: [0.5, 4.0], interior_critical_points: 1 }).unwrap()
}

fn dnoidal_3t() -> StandingWave {
    elliptic_wave(EllipticFamily::Dnoidal, -2.0, 0.5, 6, Bc::Neumann, &WaveOptions::default()).unwrap().0
}

fn report(g: f64, h: f64) -> StabilityReport {
    stability_report_for_potentials(&PotentialPair::constant(g, h, 1.0), &SpectraOptions::default()).unwrap()
}

#[test]
fn equal_counts_with_lminus_kernel_is_inconclusive() {
    let r = report(2.0 * pi2(), 4.0 * pi2());
    assert_eq!((r.p, r.q), (1, 1));
    assert_eq!(r.kernel_case, KernelCase::LminusKernel);
    assert_eq!(r.lower_bound, Some(0));
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.evidence.is_empty(), "{:?}", r.evidence);
}

#[test]
fn positive_bound_without_kernel_is_unstable() {
    let r = report(2.0 * pi2(), 0.5 * pi2());
    assert_eq!(r.kernel_case, KernelCase::NoKernel);
    assert_eq!(r.verdict, Verdict::UnstableRealEigenvalue);
    assert_eq!(r.evidence, [rules::MONOTONE_EXACT_COUNT, rules::MASLOV_LOWER_BOUND]);
    assert_eq!(r.positive_real_eigenvalues.len(), 1);
    assert!((r.positive_real_eigenvalues[0] - pi2() / 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn double_kernel_gets_no_verdict() {
    let r = report(9.0 * pi2(), 4.0 * pi2());
    assert_eq!(r.kernel_case, KernelCase::DoubleKernel);
    assert_eq!(r.corner_c, Some(1));
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.evidence.iter().any(|e| e == rules::DOUBLE_KERNEL));
}

#[test]
fn septic_wave_on_both_sides_of_the_threshold() {
    let stable = stability_report(&septic(2.12743)).unwrap();
    assert_eq!((stable.p, stable.q, stable.kernel_case), (1, 0, KernelCase::LminusKernel));
    assert!(stable.sddot[0] < 0.0);
    assert!(stable.vk_integral.unwrap() < 0.0);
    assert_eq!(stable.verdict, Verdict::SpectrallyStableImaginaryAxis);
    assert_eq!(stable.evidence[0], rules::VK_EDGE_LMINUS);
    assert!(stable.positive_real_eigenvalues.is_empty());

    let unstable = stability_report(&septic(2.776)).unwrap();
    assert_eq!((unstable.p, unstable.q), (1, 0));
    assert!(unstable.sddot[0] > 0.0);
    assert_eq!(unstable.verdict, Verdict::UnstableRealEigenvalue);
    assert_eq!(unstable.evidence[0], rules::VK_EDGE_LMINUS);
    assert_eq!(unstable.lower_bound, Some(1));
    assert_eq!(unstable.positive_real_eigenvalues.len(), 1);
}

#[test]
fn dnoidal_neumann_wave_is_unstable() {
    let w = dnoidal_3t();
    let r = stability_report(&w).unwrap();
    assert_eq!(r.kernel_case, KernelCase::LplusKernel);
    assert!(r.p >= 1);
    assert_eq!(r.q, 0);
    assert_eq!(r.corner_c, Some(0));
    assert_eq!(r.verdict, Verdict::UnstableRealEigenvalue);
    assert!(r.evidence.iter().any(|e| e == rules::NEUMANN_NONVANISHING));
    assert!(!r.positive_real_eigenvalues.is_empty());
}

#[test]
fn neumann_formula_matches_concavity() {
    let w = dnoidal_3t();
    let n = neumann_concavity_sign(&w).unwrap();
    assert_eq!(n.sign, 1);
    assert!(corner_concavity(&w).unwrap() > 0.0);
}

#[test]
fn neumann_formula_rejects_bad_input() {
    let f = Nonlinearity::CubicFocusing;
    let flat = solve_standing_wave(&f, -1.0, 1.0, Bc::Neumann, Branch { range: [1.0, 1.0], interior_critical_points: 0 });
    if let Ok(w) = flat {
        assert!(matches!(neumann_concavity_sign(&w), Err(Error::Precondition(_))));
    }
    assert!(matches!(neumann_concavity_sign(&septic(2.3)), Err(Error::Precondition(_))));
}

#[test]
fn classical_vk_matches_direct_integral() {
    let (w, _) = elliptic_wave(EllipticFamily::Cnoidal, -2.0, 0.8, 3, Bc::Dirichlet, &WaveOptions::default()).unwrap();
    let d = classical_vk(&w, VkFamily::Dirichlet).unwrap();
    assert_eq!(d.boundary_terms, 0.0);
    assert!(d.relative_gap < 1e-4, "{d:?}");
    let iv = classical_vk(&w, VkFamily::InitialValue).unwrap();
    assert!(iv.boundary_terms.abs() > 1e-3, "{iv:?}");
    assert!(iv.relative_gap < 1e-4, "{iv:?}");
}

#[test]
fn vk_sign_follows_concavity_on_septic_family() {
    for ell in [2.3, 2.7] {
        let w = septic(ell);
        let vk = classical_vk(&w, VkFamily::Dirichlet).unwrap();
        assert!(vk.relative_gap < 1e-4, "{vk:?}");
        assert_eq!(vk.value > 0.0, corner_concavity(&w).unwrap() > 0.0, "ell = {ell}");
    }
}

#[test]
fn krein_double_kernel() {
    let r = krein_analysis(&PotentialPair::constant(9.0 * pi2(), 4.0 * pi2(), 1.0)).unwrap();
    // Unit-normalized kernels: û = -√2 sin 2πx / (5π²) gives ⟨û, v⟩ = -1/(5π²).
    assert!((r.d_minus.get(0, 0) - 1.0 / (5.0 * pi2())).abs() < 1e-8);
    assert!((r.d_plus.get(0, 0) + 1.0 / (5.0 * pi2())).abs() < 1e-8);
    assert_eq!((r.n_minus_dminus, r.n_minus_dplus), (0, 1));
    assert_eq!(r.identity_c, Some(true));
    let k = &r.kks_balance;
    assert_eq!((k.k_r, k.k_c, k.k_i_minus, k.k_i_indeterminate), (0, 0, 1, 0));
    assert_eq!(k.rhs, 2);
    assert!(k.balance && k.form_p == Some(true) && k.form_q == Some(true));
    assert!(k.kernel_dimension_ok, "{}", k.zero_count);
    let neg: Vec<_> = r.spectrum.iter().filter(|e| e.im > 0.0 && e.krein.is_some_and(|v| v < 0.0)).collect();
    assert!((neg[0].im - 24f64.sqrt() * pi2()).abs() < 1e-3, "{:?}", neg[0]);
}

#[test]
fn krein_single_lminus_kernel() {
    let r = krein_analysis(&PotentialPair::constant(2.0 * pi2(), 4.0 * pi2(), 1.0)).unwrap();
    assert_eq!((r.d_plus.dim, r.d_minus.dim), (1, 0));
    assert_eq!(r.n_minus_dplus, 0);
    assert_eq!(r.identity_c, Some(true));
    let k = &r.kks_balance;
    assert_eq!((k.k_r, k.k_c, k.k_i_minus), (0, 0, 1));
    assert!(k.balance && k.constrained_count == Some(true) && k.kernel_dimension_ok);
}

#[test]
fn krein_without_kernel() {
    let r = krein_analysis(&PotentialPair::constant(2.0 * pi2(), 0.5 * pi2(), 1.0)).unwrap();
    assert_eq!(r.d_plus.dim + r.d_minus.dim, 0);
    let k = &r.kks_balance;
    assert_eq!((k.k_r, k.k_c, k.k_i_minus), (1, 0, 0));
    assert_eq!(k.no_complex_when_monotone, Some(true));
    assert!(k.balance && k.constrained_count == Some(true) && k.kernel_dimension_ok);
}
