//! Jacobi elliptic functions by the descending Landen (AGM) scheme.

use std::f64::consts::FRAC_PI_2;

/// `(sn, cn, dn)(u | m)` for parameter `m = k²` in `[0, 1]`.
pub fn eval_jacobi(u: f64, m: f64) -> (f64, f64, f64) {
    assert!((0.0..=1.0).contains(&m), "parameter m={m} outside [0,1]");
    if m == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return (u.tanh(), sech, sech);
    }
    let mut a = [0.0f64; 32];
    let mut c = [0.0f64; 32];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * a[n] && n < 31 {
        let an = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        a[n + 1] = an;
        n += 1;
    }

    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // Both forms of dn² are exact identities; pick the one without cancellation.
    let dn = if sn * sn < 0.5 { (1.0 - m * sn * sn).sqrt() } else { ((1.0 - m) + m * cn * cn).sqrt() };
    (sn, cn, dn)
}

/// Complete elliptic integral of the first kind `K(m)`.
pub fn complete_k(m: f64) -> f64 {
    assert!((0.0..1.0).contains(&m), "K(m) needs m in [0,1), got {m}");
    FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    #[test]
    fn degenerate_parameters() {
        assert_eq!(eval_jacobi(0.0, 0.5), (0.0, 1.0, 1.0));
        let (s, c, d) = eval_jacobi(1.0, 0.0);
        assert_eq!((s, c, d), (1f64.sin(), 1f64.cos(), 1.0));
        let (s, c, d) = eval_jacobi(1.0, 1.0);
        assert!((s - 1f64.tanh()).abs() < 1e-15);
        assert!((c - 1.0 / 1f64.cosh()).abs() < 1e-15);
        assert!((d - 1.0 / 1f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn quarter_period_values() {
        for m in [0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9] {
            let k = complete_k(m);
            let (s, c, d) = eval_jacobi(k, m);
            assert!((s - 1.0).abs() < 1e-12, "m={m}");
            assert!(c.abs() < 1e-7, "m={m} cn={c}");
            assert!((d - (1.0 - m).sqrt()).abs() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn k_known_value() {
        // K(1/2) = Γ(1/4)² / (4√π)
        let gamma_quarter = 3.625_609_908_221_908_3_f64;
        let exact = gamma_quarter * gamma_quarter / (4.0 * std::f64::consts::PI.sqrt());
        assert!((complete_k(0.5) - exact).abs() < 1e-14);
        assert!((complete_k(0.0) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &(u, m) in &[(0.3, 0.2), (1.7, 0.7), (-2.2, 0.95), (5.0, 0.5)] {
            let (s, c, d) = eval_jacobi(u, m);
            let (sp, cp, dp) = eval_jacobi(u + h, m);
            let (sm, cm, dm) = eval_jacobi(u - h, m);
            assert!(((sp - sm) / (2.0 * h) - c * d).abs() < 1e-8);
            assert!(((cp - cm) / (2.0 * h) + s * d).abs() < 1e-8);
            assert!(((dp - dm) / (2.0 * h) + m * s * c).abs() < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn pythagorean_identities(u in -50.0f64..50.0, m in 0.0f64..=1.0) {
            let (s, c, d) = eval_jacobi(u, m);
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-12);
            prop_assert!((d * d + m * s * s - 1.0).abs() < 1e-12);
        }
    }
}
