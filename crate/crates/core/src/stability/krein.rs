//! Krein-index comparison at the corner `(0, 1)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maslov::{self, Convention, FormMatrix};
use crate::spectra::{self, OracleEigenvalue, SpectraOptions, WhichKernel};
use crate::waves::PotentialPair;

#[derive(Debug, Clone)]
pub struct KreinOptions {
    /// Interior nodes of the coarse oracle grid.
    pub fd_n: usize,
    /// Real and imaginary parts above this count as off-axis.
    pub axis_tol: f64,
    pub spectra: SpectraOptions,
}

impl Default for KreinOptions {
    fn default() -> Self {
        Self { fd_n: 200, axis_tol: 1e-4, spectra: SpectraOptions::default() }
    }
}

/// Eigenvalue counts from the oracle and the checks that involve them.
#[derive(Debug, Clone, Serialize)]
pub struct KksBalance {
    pub k_r: usize,
    pub k_c: usize,
    pub k_i_minus: usize,
    /// Imaginary eigenvalues whose Krein value could not be signed.
    pub k_i_indeterminate: usize,
    /// Eigenvalues counted as zero; should be `2 dim ker N`.
    pub zero_count: usize,
    /// `P + Q - n₋(D₋) - n₋(D₊)`.
    pub rhs: i64,
    /// `k_r + 2 k_c + 2 k_i⁻ = rhs`.
    pub balance: bool,
    /// `k_r + 2 k_c + 2 k_i⁻ = -Γ₃ + 2P - 2 n₋(D₊)`, when `𝔠` is known.
    pub form_p: Option<bool>,
    /// `k_r + 2 k_c + 2 k_i⁻ = Γ₃ + 2Q - 2 n₋(D₋)`, when `𝔠` is known.
    pub form_q: Option<bool>,
    /// `P = 0` or `Q = 0` implies `k_c = k_i⁻ = 0`.
    pub no_complex_when_monotone: Option<bool>,
    /// `k_r = 0` implies `k_c + k_i⁻ = Q - n₋(D₋) = P - n₋(D₊)`. For
    /// `Q = 0` the count `k_r = Γ₃` turns this into
    /// `k_c + k_i⁻ = Q - n₋(D₋) = P - n₋(D₊) - k_r`, and symmetrically for
    /// `P = 0`.
    pub constrained_count: Option<bool>,
    /// The oracle found `2 dim ker N` zero eigenvalues. When false the
    /// balance hypotheses fail and mismatches are not contradictions.
    pub kernel_dimension_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KreinReport {
    pub p: usize,
    pub q: usize,
    /// `⟨ûᵢ, vⱼ⟩` over the `L₋` kernel, `z₋ × z₋`.
    pub d_plus: FormMatrix,
    /// `-⟨v̂ᵢ, uⱼ⟩` over the `L₊` kernel, `z₊ × z₊`.
    pub d_minus: FormMatrix,
    pub n_minus_dplus: usize,
    pub n_minus_dminus: usize,
    /// Corner term from the Maslov box, when resolved.
    pub corner_c: Option<i32>,
    /// `𝔠 = n₋(D₊) - n₋(D₋)`; `None` if `𝔠` is unresolved.
    pub identity_c: Option<bool>,
    pub kks_balance: KksBalance,
    #[serde(skip)]
    pub spectrum: Vec<OracleEigenvalue>,
}

pub fn krein_analysis(p: &PotentialPair) -> Result<KreinReport> {
    krein_analysis_with(p, &KreinOptions::default())
}

pub fn krein_analysis_with(p: &PotentialPair, opts: &KreinOptions) -> Result<KreinReport> {
    let mp = spectra::morse_index(&p.g, p.ell)?;
    let mm = spectra::morse_index(&p.h, p.ell)?;
    let (pp, qq) = (mp.count, mm.count);

    let mut lplus = Vec::new();
    let mut lminus = Vec::new();
    let corner_c = if mp.endpoint_kernel || mm.endpoint_kernel {
        let c = spectra::crossing_at(p, 0.0, 1.0, &opts.spectra)?;
        for k in &c.kernel {
            match maslov::kernel_component(k) {
                WhichKernel::Lplus => {
                    let vh = maslov::solve_inhomogeneous(&p.h, Convention::MinusLminusEq, &k.u)?;
                    lplus.push((k.u.clone(), vh));
                }
                WhichKernel::Lminus => {
                    let uh = maslov::solve_inhomogeneous(&p.g, Convention::LplusEq, &k.v)?;
                    lminus.push((k.v.clone(), uh));
                }
                _ => return Err(Error::Precondition("kernel at lambda = 0 must be decoupled".into())),
            }
        }
        match maslov::concavity(&c, p).and_then(|conc| maslov::correction_term(Some(&c), Some(&conc))) {
            Ok(v) => Some(v),
            Err(Error::UnresolvedCorner { .. }) | Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        Some(0)
    };
    let d_minus = DMatrix::from_fn(lplus.len(), lplus.len(), |i, j| -lplus[i].1.dot(&lplus[j].0));
    let d_plus = DMatrix::from_fn(lminus.len(), lminus.len(), |i, j| lminus[i].1.dot(&lminus[j].0));
    let d_minus = FormMatrix::new(d_minus, 1e-10);
    let d_plus = FormMatrix::new(d_plus, 1e-10);
    if d_minus.n_zero > 0 || d_plus.n_zero > 0 {
        return Err(Error::Degenerate(format!(
            "D is singular: D- = {:?}, D+ = {:?}",
            d_minus.entries, d_plus.entries
        )));
    }
    let (nm, np) = (d_minus.n_minus, d_plus.n_minus);
    let identity_c = corner_c.map(|c| c == np as i32 - nm as i32);

    let spectrum = spectra::fd_spectrum(p, 1.0, opts.fd_n)?;
    let kernel_dim = lplus.len() + lminus.len();
    let kks = balance(&spectrum, opts.axis_tol, pp, qq, np, nm, corner_c, kernel_dim);
    Ok(KreinReport {
        p: pp,
        q: qq,
        d_plus,
        d_minus,
        n_minus_dplus: np,
        n_minus_dminus: nm,
        corner_c,
        identity_c,
        kks_balance: kks,
        spectrum,
    })
}

#[allow(clippy::too_many_arguments)]
fn balance(
    spectrum: &[OracleEigenvalue],
    tol: f64,
    pp: usize,
    qq: usize,
    np: usize,
    nm: usize,
    corner_c: Option<i32>,
    kernel_dim: usize,
) -> KksBalance {
    let (mut k_r, mut k_c, mut k_i, mut k_ind, mut zeros) = (0, 0, 0, 0, 0);
    for e in spectrum {
        let modulus = e.re.hypot(e.im);
        if modulus <= (10.0 * e.error).max(1e-6) {
            zeros += 1;
        } else if e.re > tol && e.im > tol {
            k_c += 1;
        } else if e.re > tol && e.im.abs() <= tol {
            k_r += 1;
        } else if e.im > tol && e.re.abs() <= tol {
            match e.krein {
                Some(k) if k < 0.0 => k_i += 1,
                Some(_) => {}
                None => k_ind += 1,
            }
        }
    }
    let (p, q, np, nm) = (pp as i64, qq as i64, np as i64, nm as i64);
    let lhs = (k_r + 2 * k_c + 2 * k_i) as i64;
    let rhs = p + q - nm - np;
    let gamma3 = corner_c.map(|c| p - q - c as i64);
    let monotone = pp == 0 || qq == 0;
    let kci = (k_c + k_i) as i64;
    KksBalance {
        k_r,
        k_c,
        k_i_minus: k_i,
        k_i_indeterminate: k_ind,
        zero_count: zeros,
        rhs,
        balance: lhs == rhs && k_ind == 0,
        form_p: gamma3.map(|g| lhs == -g + 2 * p - 2 * np),
        form_q: gamma3.map(|g| lhs == g + 2 * q - 2 * nm),
        no_complex_when_monotone: monotone.then_some(k_c == 0 && k_i == 0),
        constrained_count: (k_r == 0 || monotone).then(|| {
            let kr = k_r as i64;
            let (dp, dq) = match (qq == 0, pp == 0) {
                (true, _) => (kr, 0),
                (false, true) => (0, kr),
                _ => (0, 0),
            };
            kci == q - nm - dq && kci == p - np - dp
        }),
        kernel_dimension_ok: zeros == 2 * kernel_dim,
    }
}
