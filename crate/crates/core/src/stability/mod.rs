//! Stability verdicts for standing waves, the Neumann and classical VK
//! concavity formulas, and Krein-index bookkeeping at the corner `(0, 1)`.

mod krein;

use serde::Serialize;

pub use krein::{krein_analysis, krein_analysis_with, KksBalance, KreinOptions, KreinReport};

use crate::error::{Error, Result};
use crate::grid;
use crate::maslov::{self, Convention, MaslovBoxReport};
use crate::ode::{self, Tolerance};
use crate::spectra::{self, SpectraOptions, WhichKernel};
use crate::waves::{self, Bc, PotentialPair, StandingWave, WaveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelCase {
    LplusKernel,
    LminusKernel,
    NoKernel,
    DoubleKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    UnstableRealEigenvalue,
    SpectrallyStableImaginaryAxis,
    Inconclusive,
}

/// Rule identifiers attached to a verdict.
pub mod rules {
    /// `0 ∈ Spec(L₊)∖Spec(L₋)` with `P - Q ∉ {-1, 0}`, or
    /// `0 ∈ Spec(L₋)∖Spec(L₊)` with `P - Q ∉ {0, 1}`.
    pub const JONES_GRILLAKIS: &str = "jones-grillakis";
    /// Nonconstant, nonvanishing Neumann wave with an interior critical point.
    pub const NEUMANN_NONVANISHING: &str = "neumann-nonvanishing";
    /// `P = 1, Q = 0` with an `L₋` kernel: the sign of `s̈(0)` decides.
    pub const VK_EDGE_LMINUS: &str = "vk-edge-lminus";
    /// `P = 0, Q = 1` with an `L₊` kernel: the sign of `s̈(0)` decides.
    pub const VK_EDGE_LPLUS: &str = "vk-edge-lplus";
    /// `P = 0` or `Q = 0`: the `λ`-crossings at `s = 1` all have one sign,
    /// so the box count `|P - Q - 𝔠|` is exact.
    pub const MONOTONE_EXACT_COUNT: &str = "monotone-exact-count";
    /// `|P - Q - 𝔠| ≥ 1` positive real eigenvalues.
    pub const MASLOV_LOWER_BOUND: &str = "maslov-lower-bound";
    /// Kernels of `L₊` and `L₋` at once: no wave-level verdict.
    pub const DOUBLE_KERNEL: &str = "double-kernel";
    /// `s̈(0)` too small to sign.
    pub const DEGENERATE_CONCAVITY: &str = "degenerate-concavity";
    /// The corner term could not be resolved.
    pub const UNRESOLVED_CORNER: &str = "unresolved-corner";
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub p: usize,
    pub q: usize,
    pub kernel_case: KernelCase,
    pub corner_c: Option<i32>,
    /// Range of the corner term when it could not be resolved.
    pub corner_interval: Option<[i32; 2]>,
    pub lower_bound: Option<u32>,
    /// VK-type integral for the normalized kernel, `⟨û, v⟩` or `⟨v̂, u⟩`.
    pub vk_integral: Option<f64>,
    pub sddot: Vec<f64>,
    pub verdict: Verdict,
    /// The rule that decided the verdict first, then any others that agree.
    pub evidence: Vec<String>,
    /// Positive real eigenvalues located independently at `s = 1`.
    pub positive_real_eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub maslov_box: Option<MaslovBoxReport>,
}

pub fn stability_report(w: &StandingWave) -> Result<StabilityReport> {
    stability_report_with(w, &SpectraOptions::default())
}

pub fn stability_report_with(w: &StandingWave, opts: &SpectraOptions) -> Result<StabilityReport> {
    assess(&waves::linearized_potentials(w)?, Some(w), opts)
}

/// The same rules applied to potentials that need not come from a wave;
/// the Neumann fast path is then unavailable.
pub fn stability_report_for_potentials(p: &PotentialPair, opts: &SpectraOptions) -> Result<StabilityReport> {
    assess(p, p.wave(), opts)
}

fn assess(p: &PotentialPair, wave: Option<&StandingWave>, opts: &SpectraOptions) -> Result<StabilityReport> {
    let cg = spectra::conjugate_points_with(&p.g, p.ell, opts.tol)?;
    let ch = spectra::conjugate_points_with(&p.h, p.ell, opts.tol)?;
    let (pp, qq) = (cg.interior.len(), ch.interior.len());
    let kernel_case = match (cg.endpoint, ch.endpoint) {
        (true, true) => KernelCase::DoubleKernel,
        (true, false) => KernelCase::LplusKernel,
        (false, true) => KernelCase::LminusKernel,
        (false, false) => KernelCase::NoKernel,
    };
    let mut report = StabilityReport {
        p: pp,
        q: qq,
        kernel_case,
        corner_c: None,
        corner_interval: None,
        lower_bound: None,
        vk_integral: None,
        sddot: vec![],
        verdict: Verdict::Inconclusive,
        evidence: vec![],
        positive_real_eigenvalues: vec![],
        maslov_box: None,
    };

    match maslov::maslov_box_with(p, opts) {
        Ok(b) => {
            report.corner_c = Some(b.corner_c);
            report.lower_bound = Some(b.lower_bound);
            if let Some(c) = &b.concavity {
                report.sddot = c.sddot.clone();
                report.vk_integral = c.vk_integrals.first().copied();
                if c.degenerate {
                    report.evidence.push(rules::DEGENERATE_CONCAVITY.into());
                }
            }
            report.positive_real_eigenvalues = b.positive_real_eigenvalues.clone();
            report.maslov_box = Some(b);
        }
        Err(Error::UnresolvedCorner { lo, hi }) => {
            report.corner_interval = Some([lo, hi]);
            report.evidence.push(rules::UNRESOLVED_CORNER.into());
        }
        Err(Error::Degenerate(msg)) => {
            report.evidence.push(format!("{}: {msg}", rules::DEGENERATE_CONCAVITY));
        }
        Err(e) => return Err(e),
    }

    if kernel_case == KernelCase::DoubleKernel {
        report.evidence.push(rules::DOUBLE_KERNEL.into());
        return Ok(report);
    }

    let diff = pp as i32 - qq as i32;
    let mut fired: Vec<(&str, Verdict)> = Vec::new();
    let jg = match kernel_case {
        KernelCase::LplusKernel => !(diff == -1 || diff == 0),
        KernelCase::LminusKernel => !(diff == 0 || diff == 1),
        _ => false,
    };
    if jg {
        fired.push((rules::JONES_GRILLAKIS, Verdict::UnstableRealEigenvalue));
    }
    let fast = wave.is_some_and(|w| {
        w.bc == Bc::Neumann && w.is_nonvanishing() && !w.is_constant() && w.interior_critical_points() >= 1
    });
    if fast {
        fired.push((rules::NEUMANN_NONVANISHING, Verdict::UnstableRealEigenvalue));
    }
    let sddot = report.sddot.first().copied();
    let degenerate = report.evidence.iter().any(|e| e.starts_with(rules::DEGENERATE_CONCAVITY));
    let edge = match (kernel_case, pp, qq) {
        (KernelCase::LminusKernel, 1, 0) => Some(rules::VK_EDGE_LMINUS),
        (KernelCase::LplusKernel, 0, 1) => Some(rules::VK_EDGE_LPLUS),
        _ => None,
    };
    if let (Some(rule), Some(sd), false) = (edge, sddot, degenerate) {
        let v = if sd > 0.0 { Verdict::UnstableRealEigenvalue } else { Verdict::SpectrallyStableImaginaryAxis };
        fired.push((rule, v));
    }
    if let (Some(bound), true) = (report.lower_bound, pp == 0 || qq == 0) {
        let v = if bound == 0 { Verdict::SpectrallyStableImaginaryAxis } else { Verdict::UnstableRealEigenvalue };
        fired.push((rules::MONOTONE_EXACT_COUNT, v));
    }
    if let Some(bound) = report.lower_bound {
        if bound >= 1 {
            fired.push((rules::MASLOV_LOWER_BOUND, Verdict::UnstableRealEigenvalue));
        }
    }

    if let Some(&(_, v)) = fired.first() {
        report.verdict = v;
        for (rule, rv) in fired {
            if rv == v {
                report.evidence.push(rule.into());
            } else {
                report.evidence.push(format!("conflict:{rule}"));
            }
        }
    }
    Ok(report)
}

/// `∫ p² - (p(ℓ)/q(ℓ)) ℓ²` for the fundamental pair of `L₋ v = 0`; its sign
/// is that of `s̈(0)` for a Neumann wave with `L₊ φ' = 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NeumannConcavity {
    pub sign: i8,
    pub value: f64,
}

pub fn neumann_concavity_sign(w: &StandingWave) -> Result<NeumannConcavity> {
    if w.bc != Bc::Neumann {
        return Err(Error::Precondition("Neumann boundary conditions required".into()));
    }
    if w.is_constant() {
        return Err(Error::Precondition("constant wave: φ' is not an eigenfunction".into()));
    }
    let p = waves::linearized_potentials(w)?;
    let n = w.grid();
    let xs: Vec<f64> = grid::nodes(w.ell, n).skip(1).collect();
    let states = ode::integrate_samples(
        |x, y: &[f64; 4], dy: &mut [f64; 4]| {
            let hx = p.h.value(x);
            dy[0] = y[1];
            dy[1] = -hx * y[0];
            dy[2] = y[3];
            dy[3] = -hx * y[2];
        },
        0.0,
        [1.0, 0.0, 0.0, 1.0],
        &xs,
        Tolerance::default(),
    )
    .map_err(|e| Error::Integration { lambda: 0.0, s: 1.0, reason: format!("{} at x={}", e.reason, e.x) })?;
    let mut p2 = vec![1.0];
    p2.extend(states.iter().map(|y| y[0] * y[0]));
    let last = states.last().expect("nonempty grid");
    let (pl, ql) = (last[0], last[2]);
    if ql.abs() < 1e-10 {
        return Err(Error::Degenerate(format!("q(ell) = {ql:e}: L- would have a kernel")));
    }
    let value = grid::simpson(&p2, w.profile.step()) - pl / ql * w.ell * w.ell;
    Ok(NeumannConcavity { sign: if value > 0.0 { 1 } else { -1 }, value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VkFamily {
    /// Waves at nearby `β` with the same Dirichlet ends and length.
    Dirichlet,
    /// Solutions with the same initial data, which leave the boundary
    /// condition at `ℓ`; the boundary correction terms are added.
    InitialValue,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VkReport {
    /// `½ ∂β ∫ φ²` plus boundary terms for a family that leaves the
    /// boundary conditions.
    pub value: f64,
    /// The boundary correction included in `value`.
    pub boundary_terms: f64,
    /// `⟨û, φ⟩` with `L₊ û = φ`, computed directly.
    pub direct: f64,
    pub relative_gap: f64,
}

pub const VK_STEP: f64 = 1e-4;

pub fn classical_vk(w: &StandingWave, family: VkFamily) -> Result<VkReport> {
    if w.bc != Bc::Dirichlet {
        return Err(Error::Precondition("classical VK needs a Dirichlet wave".into()));
    }
    let p = waves::linearized_potentials(w)?;
    if spectra::conjugate_points(&p.g, p.ell)?.endpoint {
        return Err(Error::Precondition("0 is in Spec(L+): the family is not unique".into()));
    }
    let opts = WaveOptions { grid: w.grid(), ..Default::default() };
    let member = |b: f64| -> Result<StandingWave> {
        match family {
            VkFamily::Dirichlet => w.continue_to(b, &opts),
            VkFamily::InitialValue => w.initial_value_family(b, &opts),
        }
    };
    let d = VK_STEP * w.beta.abs().max(1.0);
    // Central differences at δ and δ/2, Richardson extrapolated.
    let derivative = |f: &dyn Fn(&StandingWave) -> f64| -> Result<f64> {
        let mut cd = [0.0; 2];
        for (k, h) in [d, d / 2.0].into_iter().enumerate() {
            let (a, b) = (member(w.beta + h)?, member(w.beta - h)?);
            cd[k] = (f(&a) - f(&b)) / (2.0 * h);
        }
        Ok((4.0 * cd[1] - cd[0]) / 3.0)
    };
    let half_mass = 0.5 * derivative(&|x: &StandingWave| x.mass())?;

    let boundary_terms = match family {
        VkFamily::Dirichlet => 0.0,
        VkFamily::InitialValue => {
            let q = w.interior_zeros();
            let sg = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
            let d0 = derivative(&|x: &StandingWave| x.profile.val[0])?;
            let dl = derivative(&|x: &StandingWave| x.profile.last().0)?;
            let dpl = derivative(&|x: &StandingWave| x.profile.last().1)?;
            let ql = second_solution_end(&p.g, p.ell)?;
            (sg * d0 + dl) * ((d0 + sg * dl) / ql + dpl)
        }
    };
    let value = half_mass + boundary_terms;
    let uh = maslov::solve_inhomogeneous(&p.g, Convention::LplusEq, &w.profile)?;
    let direct = uh.dot(&w.profile);
    Ok(VkReport { value, boundary_terms, direct, relative_gap: (value - direct).abs() / direct.abs() })
}

/// `q(ℓ)` for `q'' + g q = 0`, `q(0) = 0`, `q'(0) = 1`.
fn second_solution_end(g: &waves::Scalar, ell: f64) -> Result<f64> {
    let y = ode::integrate_to(
        |x, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -g.value(x) * y[0];
        },
        0.0,
        [0.0, 1.0],
        ell,
        Tolerance::default(),
    )
    .map_err(|e| Error::Integration { lambda: 0.0, s: 1.0, reason: format!("{} at x={}", e.reason, e.x) })?;
    Ok(y[0])
}

/// `s̈(0)` at `(0, 1)` for a wave, with its sign as the VK verdict.
pub fn corner_concavity(w: &StandingWave) -> Result<f64> {
    let p = waves::linearized_potentials(w)?;
    let c = spectra::crossing_at(&p, 0.0, 1.0, &SpectraOptions::default())?;
    if c.which_kernel == WhichKernel::Both || c.kernel_dim != 1 {
        return Err(Error::Precondition("simple kernel at s = 1 required".into()));
    }
    Ok(maslov::concavity(&c, &p)?.sddot[0])
}

/// Length at which `s̈(0)` changes sign along a family of waves indexed
/// by `ℓ`, by bisection on `[lo, hi]` to `tol`.
pub fn vk_threshold(wave_at: impl Fn(f64) -> Result<StandingWave>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |l: f64| wave_at(l).and_then(|w| corner_concavity(&w));
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    if fa * f(b)? > 0.0 {
        return Err(Error::InvalidInput(format!("no sign change of the concavity on [{lo}, {hi}]")));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests;
