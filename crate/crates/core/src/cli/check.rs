//! Invariant suite behind `maslov-stab check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Builtin, RunConfig};
use crate::error::Result;
use crate::maslov;
use crate::spectra::{self, SpectraOptions};
use crate::stability::{self, KreinOptions, Verdict};
use crate::waves::{PotentialPair, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub target: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn record(out: &mut Vec<CheckResult>, target: &str, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    out.push(CheckResult { target: target.into(), name: name.into(), passed, detail });
}

/// Box identities, Krein identities and axis confinement on the built-in
/// problems, Morse counts on seeded random potentials, and verdict
/// soundness on the configured problem if there is one.
pub fn run_checks(cfg: Option<&RunConfig>) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let opts = cfg.map_or_else(SpectraOptions::default, RunConfig::spectra_options);
    let fd_n = cfg.map_or(200, |c| c.resolution.fd_n);
    for b in Builtin::ALL {
        potentials_checks(&mut out, b.name(), &b.potentials(), &opts, fd_n);
    }
    let (seed, samples) = cfg.map_or((0, 20), |c| (c.seed, c.resolution.check_samples));
    morse_checks(&mut out, seed, samples);
    if let Some(c) = cfg {
        let (wave, p) = c.build()?;
        let target = "config";
        potentials_checks(&mut out, target, &p, &opts, fd_n);
        record(&mut out, target, "verdict_soundness", || {
            let r = match &wave {
                Some(w) => stability::stability_report_with(w, &opts)?,
                None => stability::stability_report_for_potentials(&p, &opts)?,
            };
            let roots = r.positive_real_eigenvalues.len();
            let ok = match r.verdict {
                Verdict::UnstableRealEigenvalue => roots >= 1,
                Verdict::SpectrallyStableImaginaryAxis => roots == 0 && (r.p == 0 || r.q == 0),
                Verdict::Inconclusive => true,
            };
            Ok((ok, format!("{:?} with {roots} positive real roots", r.verdict)))
        });
    }
    Ok(out)
}

fn potentials_checks(out: &mut Vec<CheckResult>, target: &str, p: &PotentialPair, opts: &SpectraOptions, fd_n: usize) {
    record(out, target, "maslov_box", || {
        let b = maslov::maslov_box_with(p, opts)?;
        let recount = b.gamma3_recount == Some(b.gamma3_index);
        let arrival = b.arrival_check.is_none_or(|(a, c)| a == c);
        let exact = !(b.p == 0 || b.q == 0) || b.lower_bound as usize == b.positive_real_eigenvalues.len();
        let detail = format!(
            "P={} Q={} c={} gamma3={} recount={:?} arrival={:?} bound={} roots={}",
            b.p,
            b.q,
            b.corner_c,
            b.gamma3_index,
            b.gamma3_recount,
            b.arrival_check,
            b.lower_bound,
            b.positive_real_eigenvalues.len()
        );
        Ok((recount && arrival && exact, detail))
    });
    record(out, target, "krein", || {
        let k = stability::krein_analysis_with(p, &KreinOptions { fd_n, spectra: *opts, ..Default::default() })?;
        let b = &k.kks_balance;
        let ok = k.identity_c != Some(false)
            && (!b.kernel_dimension_ok || b.balance)
            && b.form_p != Some(false)
            && b.form_q != Some(false)
            && b.no_complex_when_monotone != Some(false)
            && b.constrained_count != Some(false);
        let detail = format!(
            "n-(D+)={} n-(D-)={} c={:?} k_r={} k_c={} k_i-={} rhs={} zeros={}",
            k.n_minus_dplus, k.n_minus_dminus, k.corner_c, b.k_r, b.k_c, b.k_i_minus, b.rhs, b.zero_count
        );
        let monotone = k.p == 0 || k.q == 0;
        let off_axis = k.spectrum.iter().filter(|e| e.re.abs().min(e.im.abs()) > 1e-5).count();
        Ok((ok && !(monotone && off_axis > 0), format!("{detail} off_axis={off_axis}")))
    });
}

fn morse_checks(out: &mut Vec<CheckResult>, seed: u64, samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-80.0..80.0)).collect();
        let q = Scalar::polynomial(coeffs.clone());
        let fd = spectra::fd_scalar_eigenvalues(&q, 1.0, 400, 12);
        if fd.iter().any(|e| e.abs() < 1e-3) {
            skipped += 1;
            continue;
        }
        let want = fd.iter().filter(|&&e| e < 0.0).count();
        match spectra::morse_index(&q, 1.0) {
            Ok(m) if m.count == want && !m.endpoint_kernel => agree += 1,
            Ok(m) => failures.push(format!("{coeffs:?}: {} vs {want}", m.count)),
            Err(e) => failures.push(format!("{coeffs:?}: {e}")),
        }
    }
    out.push(CheckResult {
        target: format!("random(seed={seed})"),
        name: "morse_index".into(),
        passed: failures.is_empty(),
        detail: format!("{agree} agree, {skipped} near-singular skipped, failures: {failures:?}"),
    });
}
