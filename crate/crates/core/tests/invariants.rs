use std::f64::consts::PI;

use proptest::prelude::*;

use maslov_stab::maslov::{crossing_form_lambda, maslov_box};
use maslov_stab::spectra::{real_eigenvalues, SpectraOptions};
use maslov_stab::stability::{stability_report_for_potentials, Verdict};
use maslov_stab::waves::PotentialPair;

const PI2: f64 = PI * PI;

/// `(m + u)² π²`, away from the Dirichlet eigenvalues on `[0, 1]`.
fn off_square() -> impl Strategy<Value = f64> {
    (0u32..5, 0.15f64..0.85).prop_map(|(m, u)| (m as f64 + u).powi(2) * PI2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda_forms_have_one_sign_when_one_count_vanishes(g in off_square(), h in -2.0f64..0.9, flip in any::<bool>()) {
        // Q = 0 when h < π²; swapping the roles gives P = 0.
        let (g, h) = if flip { (h * PI2, g) } else { (g, h * PI2) };
        let p = PotentialPair::constant(g, h, 1.0);
        let lam_inf = 1.05 * p.sup_norm() + 1.0;
        for c in real_eigenvalues(&p, 1.0, [1e-3 * lam_inf, lam_inf], &SpectraOptions::default()).unwrap() {
            let f = crossing_form_lambda(&c).unwrap();
            let want = if flip { -(c.kernel_dim as i32) } else { c.kernel_dim as i32 };
            prop_assert_eq!(f.signature, want, "λ = {}", c.lambda0);
        }
    }

    #[test]
    fn box_closes_without_kernel(g in off_square(), h in off_square()) {
        let b = maslov_box(&PotentialPair::constant(g, h, 1.0)).unwrap();
        let gamma2: i32 = b.gamma2_signatures.iter().map(|x| x.1).sum();
        prop_assert_eq!(b.corner_c, 0);
        prop_assert_eq!(Some(-gamma2), b.gamma3_recount);
        prop_assert!(b.lower_bound as usize <= b.positive_real_eigenvalues.len());
        if b.p == 0 || b.q == 0 {
            prop_assert_eq!(b.lower_bound as usize, b.positive_real_eigenvalues.len());
        }
    }

    #[test]
    fn verdicts_are_sound(g in off_square(), h in off_square()) {
        let r = stability_report_for_potentials(&PotentialPair::constant(g, h, 1.0), &SpectraOptions::default()).unwrap();
        match r.verdict {
            Verdict::UnstableRealEigenvalue => prop_assert!(!r.positive_real_eigenvalues.is_empty()),
            Verdict::SpectrallyStableImaginaryAxis => {
                prop_assert!(r.positive_real_eigenvalues.is_empty());
                prop_assert!(r.p == 0 || r.q == 0);
            }
            Verdict::Inconclusive => prop_assert!(r.lower_bound == Some(0)),
        }
    }
}
