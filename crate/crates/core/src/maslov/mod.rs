//! Crossing forms along the sides of the Maslov box, second-order forms and
//! concavities at the corner `(0, 1)`, the corner term and the box index
//! bookkeeping that bounds the number of positive real eigenvalues.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{self, GridFn};
use crate::hamflow::SampledPair;
use crate::ode::{self, Tolerance};
use crate::spectra::{self, Crossing, SpectraOptions, WhichKernel};
use crate::waves::{PotentialPair, Scalar};

/// A small symmetric form, row-major, with its inertia.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormMatrix {
    pub dim: usize,
    pub entries: Vec<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub signature: i32,
}

impl FormMatrix {
    /// Eigenvalues with `|μ| ≤ zero_tol` count as zero.
    pub fn new(m: DMatrix<f64>, zero_tol: f64) -> Self {
        let dim = m.nrows();
        let sym = (&m + m.transpose()) * 0.5;
        let eig = if dim == 0 { DVector::zeros(0) } else { SymmetricEigen::new(sym.clone()).eigenvalues };
        let n_plus = eig.iter().filter(|&&e| e > zero_tol).count();
        let n_minus = eig.iter().filter(|&&e| e < -zero_tol).count();
        let entries = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| sym[(i, j)]).collect();
        Self { dim, entries, n_plus, n_minus, n_zero: dim - n_plus - n_minus, signature: n_plus as i32 - n_minus as i32 }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.n_zero == self.dim
    }
}

fn gram(kernel: &[SampledPair], f: impl Fn(&SampledPair, &SampledPair) -> f64) -> DMatrix<f64> {
    let n = kernel.len();
    DMatrix::from_fn(n, n, |i, j| f(&kernel[i], &kernel[j]))
}

fn require_kernel(c: &Crossing) -> Result<()> {
    if c.kernel.is_empty() || c.kernel_dim == 0 {
        return Err(Error::Precondition("not a crossing: empty kernel".into()));
    }
    Ok(())
}

/// Crossing form of `s ↦ Λ(λ₀, s)`. At `λ₀ = 0` it is the boundary form
/// `(ℓ/s₀²)[-u'(ℓ)² + v'(ℓ)²]`; otherwise the integral
/// `(1/s₀) ⟨(∂ₛB_{s₀} - 2s₀λ₀) u, S u⟩`.
pub fn crossing_form_s(c: &Crossing, p: &PotentialPair) -> Result<FormMatrix> {
    require_kernel(c)?;
    let (s, l0, ell) = (c.s0, c.lambda0, c.ell());
    let m = if l0 == 0.0 {
        gram(&c.kernel, |a, b| {
            let (ua, va) = (a.u.last().1, a.v.last().1);
            let (ub, vb) = (b.u.last().1, b.v.last().1);
            ell / (s * s) * (-ua * ub + va * vb)
        })
    } else {
        crossing_form_s_integral(c, p)
    };
    let tol = 1e-8 * m.amax().max(1.0);
    Ok(FormMatrix::new(m, tol))
}

/// The integral form of the `s`-crossing form, valid at every `λ₀`.
pub fn crossing_form_s_integral(c: &Crossing, p: &PotentialPair) -> DMatrix<f64> {
    let (s, l0) = (c.s0, c.lambda0);
    let k0 = &c.kernel[0].u;
    let n = k0.intervals();
    let h = k0.step();
    // ∂ₛB_s = [[0, b12], [b21, 0]].
    let b12: Vec<f64> = (0..=n)
        .map(|i| {
            let x = k0.x(i);
            let (hv, hd) = p.h.value_and_derivative(s * x);
            2.0 * s * hv + s * s * hd * x
        })
        .collect();
    let b21: Vec<f64> = (0..=n)
        .map(|i| {
            let x = k0.x(i);
            let (gv, gd) = p.g.value_and_derivative(s * x);
            -(2.0 * s * gv + s * s * gd * x)
        })
        .collect();
    gram(&c.kernel, |a, b| {
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                b12[i] * a.v.val[i] * b.v.val[i] + b21[i] * a.u.val[i] * b.u.val[i]
                    - 2.0 * s * l0 * (a.u.val[i] * b.v.val[i] + a.v.val[i] * b.u.val[i])
            })
            .collect();
        grid::simpson(&f, h) / s
    })
}

/// Crossing form of `λ ↦ Λ(λ, s₀)`: `-s₀ ⟨u, S u⟩`.
pub fn crossing_form_lambda(c: &Crossing) -> Result<FormMatrix> {
    require_kernel(c)?;
    let s = c.s0;
    let m = gram(&c.kernel, |a, b| -s * (a.u.dot(&b.v) + a.v.dot(&b.u)));
    Ok(FormMatrix::new(m, 1e-8 * s))
}

/// Slope `ds/dλ` of the curve through a simple crossing, `-m_λ/m_s`.
pub fn hadamard_slope(c: &Crossing, p: &PotentialPair) -> Result<f64> {
    if c.kernel_dim != 1 {
        return Err(Error::Precondition("slope needs a one-dimensional kernel".into()));
    }
    let ms = crossing_form_s(c, p)?;
    let ml = crossing_form_lambda(c)?;
    if ms.n_zero > 0 {
        return Err(Error::Degenerate("vanishing s-crossing form".into()));
    }
    Ok(-ml.get(0, 0) / ms.get(0, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `L₊ w = f` with `L₊ = -∂ₓₓ - q`.
    LplusEq,
    /// `-L₋ w = f` with `L₋ = -∂ₓₓ - q`.
    MinusLminusEq,
}

/// Dirichlet solution of `L w = f` (or `-L w = f`) for `L = -∂ₓₓ - q` on the
/// grid of `rhs`, by variation of parameters. When `L` has a kernel the
/// right-hand side must be orthogonal to it and the solution returned is the
/// one orthogonal to the kernel.
pub fn solve_inhomogeneous(q: &Scalar, conv: Convention, rhs: &GridFn) -> Result<GridFn> {
    let n = rhs.intervals();
    let (ell, h) = (rhs.ell, rhs.step());
    let sigma = match conv {
        Convention::LplusEq => 1.0,
        Convention::MinusLminusEq => -1.0,
    };
    // Fundamental pair at the identity: p(0)=1, p'(0)=0 and r(0)=0, r'(0)=1.
    let xs: Vec<f64> = grid::nodes(ell, n).skip(1).collect();
    let states = ode::integrate_samples(
        |x, y: &[f64; 4], dy: &mut [f64; 4]| {
            let qx = q.value(x);
            dy[0] = y[1];
            dy[1] = -qx * y[0];
            dy[2] = y[3];
            dy[3] = -qx * y[2];
        },
        0.0,
        [1.0, 0.0, 0.0, 1.0],
        &xs,
        Tolerance::default(),
    )
    .map_err(|e| Error::Integration { lambda: 0.0, s: 1.0, reason: format!("{} at x={}", e.reason, e.x) })?;
    let mut pv = vec![1.0];
    let mut pd = vec![0.0];
    let mut rv = vec![0.0];
    let mut rd = vec![1.0];
    for y in &states {
        pv.push(y[0]);
        pd.push(y[1]);
        rv.push(y[2]);
        rd.push(y[3]);
    }

    // w'' + q w = F with F = -σ f.
    let ff: Vec<f64> = rhs.val.iter().map(|v| -sigma * v).collect();
    let fd: Vec<f64> = rhs.der.iter().map(|v| -sigma * v).collect();
    let ia: Vec<f64> = (0..=n).map(|i| pv[i] * ff[i]).collect();
    let iad: Vec<f64> = (0..=n).map(|i| pd[i] * ff[i] + pv[i] * fd[i]).collect();
    let ib: Vec<f64> = (0..=n).map(|i| rv[i] * ff[i]).collect();
    let ibd: Vec<f64> = (0..=n).map(|i| rd[i] * ff[i] + rv[i] * fd[i]).collect();
    let a = grid::cumulative_integral(&ia, &iad, h);
    let b = grid::cumulative_integral(&ib, &ibd, h);
    let wv: Vec<f64> = (0..=n).map(|i| rv[i] * a[i] - pv[i] * b[i]).collect();
    let wd: Vec<f64> = (0..=n).map(|i| rd[i] * a[i] - pd[i] * b[i]).collect();
    let wp = GridFn::new(ell, wv, wd);
    let r = GridFn::new(ell, rv, rd);

    let r_sup = r.sup_norm();
    let c = if r.val[n].abs() > 1e-8 * r_sup {
        -wp.val[n] / r.val[n]
    } else {
        let overlap = rhs.dot(&r) / (rhs.norm() * r.norm()).max(f64::MIN_POSITIVE);
        if overlap.abs() > 1e-8 {
            return Err(Error::Fredholm { overlap });
        }
        -wp.dot(&r) / r.dot(&r)
    };
    Ok(wp.axpy(c, &r))
}

/// Second-order form at a crossing `(0, s₀)` where the first-order
/// `λ`-form vanishes: entries `-2s₀³ ⟨wᵢ, S uⱼ⟩` with `N_{s₀} wᵢ = uᵢ`.
#[derive(Debug, Clone, Serialize)]
pub struct SecondOrderForm {
    pub form: FormMatrix,
    /// `⟨v̂, u⟩` for `L₊`-kernel elements and `⟨û, v⟩` for `L₋`-kernel
    /// elements, in kernel order.
    pub integrals: Vec<f64>,
    #[serde(skip)]
    pub generalized_kernel: Vec<SampledPair>,
    /// A zero eigenvalue: higher-order analysis would be needed.
    pub degenerate: bool,
}

pub(crate) fn kernel_component(k: &SampledPair) -> WhichKernel {
    if k.v.sup_norm() == 0.0 {
        WhichKernel::Lplus
    } else if k.u.sup_norm() == 0.0 {
        WhichKernel::Lminus
    } else {
        WhichKernel::Coupled
    }
}

pub(crate) fn generalized_kernel(c: &Crossing, p: &PotentialPair) -> Result<(Vec<SampledPair>, Vec<f64>)> {
    let s = c.s0;
    let mut gen = Vec::new();
    let mut ints = Vec::new();
    for k in &c.kernel {
        match kernel_component(k) {
            WhichKernel::Lplus => {
                let vh = solve_inhomogeneous(&p.h.rescaled(s), Convention::MinusLminusEq, &k.u)?;
                ints.push(vh.dot(&k.u));
                gen.push(SampledPair { u: GridFn::zeros(k.u.ell, k.u.intervals()), v: vh });
            }
            WhichKernel::Lminus => {
                let uh = solve_inhomogeneous(&p.g.rescaled(s), Convention::LplusEq, &k.v)?;
                ints.push(uh.dot(&k.v));
                gen.push(SampledPair { u: uh, v: GridFn::zeros(k.v.ell, k.v.intervals()) });
            }
            _ => return Err(Error::Precondition("kernel at lambda = 0 must be decoupled".into())),
        }
    }
    Ok((gen, ints))
}

pub fn second_order_form(c: &Crossing, p: &PotentialPair) -> Result<SecondOrderForm> {
    require_kernel(c)?;
    if c.lambda0 != 0.0 {
        return Err(Error::Precondition("second-order form is only evaluated at lambda = 0".into()));
    }
    let ml = crossing_form_lambda(c)?;
    if !ml.is_zero() {
        return Err(Error::Precondition(format!("first-order lambda form is nonzero: {:?}", ml.entries)));
    }
    let s = c.s0;
    let (gen, integrals) = generalized_kernel(c, p)?;
    let m = DMatrix::from_fn(c.kernel.len(), c.kernel.len(), |i, j| {
        let (w, u) = (&gen[i], &c.kernel[j]);
        // ⟨w, S u⟩ = ⟨w_u, u_v⟩ + ⟨w_v, u_u⟩.
        -2.0 * s.powi(3) * (w.u.dot(&u.v) + w.v.dot(&u.u))
    });
    let form = FormMatrix::new(m, 1e-8 * s.powi(3));
    let degenerate = form.n_zero > 0;
    Ok(SecondOrderForm { form, integrals, generalized_kernel: gen, degenerate })
}

/// Local shape of the eigenvalue curves through a conjugate point `(0, s₀)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    pub s0: f64,
    /// `ṡ(0)`, always zero at `λ = 0`.
    pub sdot0: f64,
    /// `s̈(0)`, one per curve; with a double kernel the first belongs to the
    /// `L₊` eigenfunction.
    pub sddot: Vec<f64>,
    /// Side of `s₀` the curve leaves towards, `None` if undetermined.
    pub s_sharp: Vec<Option<i8>>,
    pub kernel_kind: Vec<WhichKernel>,
    /// `⟨v̂, u⟩` or `⟨û, v⟩` per curve.
    pub vk_integrals: Vec<f64>,
    /// `|s̈(0)|` below tolerance on some curve.
    pub degenerate: bool,
    /// `s♯` was read off a traced curve instead of from `s̈(0)`.
    pub traced: bool,
    /// Double kernel only: `⟨u₁, v₂⟩`.
    pub overlap: Option<f64>,
    /// Double kernel only: the sum that must not vanish for the two curves
    /// to separate.
    pub separation: Option<f64>,
    /// Double kernel with `⟨u₁, v₂⟩ ≠ 0`: no curve passes through the point.
    pub isolated: bool,
}

pub const SDDOT_TOL: f64 = 1e-7;

pub fn concavity(c: &Crossing, p: &PotentialPair) -> Result<ConcavityReport> {
    require_kernel(c)?;
    if c.lambda0 != 0.0 {
        return Err(Error::Precondition("concavity is computed at lambda = 0 only".into()));
    }
    let (s, ell) = (c.s0, c.ell());
    let kinds: Vec<WhichKernel> = c.kernel.iter().map(kernel_component).collect();
    let mut report = ConcavityReport {
        s0: s,
        sdot0: 0.0,
        sddot: vec![],
        s_sharp: vec![],
        kernel_kind: kinds.clone(),
        vk_integrals: vec![],
        degenerate: false,
        traced: false,
        overlap: None,
        separation: None,
        isolated: false,
    };
    if c.kernel.len() == 2 {
        let ov = c.kernel[0].u.dot(&c.kernel[1].v);
        report.overlap = Some(ov);
        if ov.abs() > 1e-8 {
            report.isolated = true;
            return Ok(report);
        }
    }
    let (_, ints) = generalized_kernel(c, p)?;
    let mut terms = Vec::new();
    for (k, (&kind, &int)) in kinds.iter().zip(&ints).enumerate() {
        let kf = &c.kernel[k];
        let (sign, slope) = match kind {
            WhichKernel::Lplus => (-1.0, kf.u.last().1),
            _ => (1.0, kf.v.last().1),
        };
        terms.push(int / (slope * slope));
        report.sddot.push(sign * 2.0 * s.powi(5) / ell * int / (slope * slope));
        report.vk_integrals.push(int);
    }
    if terms.len() == 2 {
        let sep = terms[0] + terms[1];
        report.separation = Some(sep);
        if sep.abs() <= 1e-8 * (terms[0].abs() + terms[1].abs()) {
            return Err(Error::Degenerate(format!("nongeneric tangency: separation condition {sep:e} vanishes")));
        }
    }
    report.degenerate = report.sddot.iter().any(|v| v.abs() < SDDOT_TOL);
    if !report.degenerate {
        report.s_sharp = report.sddot.iter().map(|v| Some(if *v > 0.0 { 1 } else { -1 })).collect();
    } else if c.kernel.len() == 1 {
        report.traced = true;
        report.s_sharp = vec![traced_side(p, s)?];
    } else {
        report.s_sharp = report
            .sddot
            .iter()
            .map(|v| (v.abs() >= SDDOT_TOL).then_some(if *v > 0.0 { 1 } else { -1 }))
            .collect();
    }
    Ok(report)
}

/// Which side of `s₀` the eigenvalue curve through `(0, s₀)` lies on for
/// small `λ > 0`, read off the zero of `s ↦ det X` closest to `s₀`.
fn traced_side(p: &PotentialPair, s0: f64) -> Result<Option<i8>> {
    let scale = p.sup_norm().max(1.0);
    let smax = (s0 + 0.05).min(p.max_rescaling());
    let smin = s0 - 0.05;
    let tol = Tolerance::default();
    let mut sides = Vec::new();
    for f in [1e-2, 3e-3, 1e-3] {
        let lam = f * scale;
        let m = 400;
        let ss: Vec<f64> = (0..=m).map(|i| smin + (smax - smin) * i as f64 / m as f64).collect();
        let d: Vec<f64> = ss.iter().map(|&s| spectra::char_det_with(p, lam, s, tol)).collect::<Result<_>>()?;
        let mut best: Option<f64> = None;
        for i in 0..m {
            if d[i] == 0.0 || d[i] * d[i + 1] < 0.0 {
                let r = spectra::trace_branch(p, &[lam], [ss[i], ss[i + 1]], tol)?[0].unwrap_or(ss[i]);
                if best.is_none_or(|b| (r - s0).abs() < (b - s0).abs()) {
                    best = Some(r);
                }
            }
        }
        match best {
            Some(r) if (r - s0).abs() > 1e-12 * s0 => sides.push(if r > s0 { 1i8 } else { -1 }),
            _ => return Ok(None),
        }
    }
    Ok(sides.windows(2).all(|w| w[0] == w[1]).then(|| sides[0]))
}

/// The corner term from the local analysis at `s = 1`. `None` for either
/// argument means there is no conjugate point at `s = 1`.
pub fn correction_term(c: Option<&Crossing>, conc: Option<&ConcavityReport>) -> Result<i32> {
    let (Some(c), Some(conc)) = (c, conc) else {
        return Ok(0);
    };
    if conc.isolated {
        return Ok(0);
    }
    let mut total = 0;
    let (mut lo, mut hi) = (0, 0);
    let mut unresolved = false;
    for (kind, sharp) in conc.kernel_kind.iter().zip(&conc.s_sharp) {
        let (neg, range) = match kind {
            WhichKernel::Lplus => (-1, (-1, 0)),
            WhichKernel::Lminus => (1, (0, 1)),
            _ => return Err(Error::Precondition(format!("unexpected kernel at s = 1: {:?}", c.which_kernel))),
        };
        match sharp {
            Some(1) => {}
            Some(_) => total += neg,
            None => unresolved = true,
        }
        lo += range.0;
        hi += range.1;
    }
    if unresolved {
        return Err(Error::UnresolvedCorner { lo, hi });
    }
    Ok(total)
}

/// Index bookkeeping for the Maslov box.
#[derive(Debug, Clone, Serialize)]
pub struct MaslovBoxReport {
    /// Morse indices of `L₊` and `L₋`.
    pub p: usize,
    pub q: usize,
    pub gamma2_index: i32,
    /// Signatures of the `s`-forms at the conjugate points inside `(0, 1)`.
    pub gamma2_signatures: Vec<(f64, i32)>,
    pub corner_c: i32,
    pub gamma3_index: i32,
    pub lower_bound: u32,
    pub kernel_at_one: Option<WhichKernel>,
    pub concavity: Option<ConcavityReport>,
    /// `𝔠 - dim ker L₋` against `-n₋(m⁽²⁾)`, when the second-order form applies.
    pub arrival_check: Option<(i32, i32)>,
    /// Sum of `λ`-form signatures over positive real eigenvalues at `s = 1`,
    /// when every such crossing is regular.
    pub gamma3_recount: Option<i32>,
    pub positive_real_eigenvalues: Vec<f64>,
}

pub fn maslov_box(p: &PotentialPair) -> Result<MaslovBoxReport> {
    maslov_box_with(p, &SpectraOptions::default())
}

pub fn maslov_box_with(p: &PotentialPair, opts: &SpectraOptions) -> Result<MaslovBoxReport> {
    let cg = spectra::conjugate_points_with(&p.g, p.ell, opts.tol)?;
    let ch = spectra::conjugate_points_with(&p.h, p.ell, opts.tol)?;
    let (pp, qq) = (cg.interior.len(), ch.interior.len());

    // Γ₂: verify each conjugate point's signature against its kernel type.
    let mut pts: Vec<f64> = cg.interior.iter().chain(&ch.interior).copied().collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut gamma2_signatures = Vec::new();
    for &s0 in &pts {
        let c = spectra::crossing_at(p, 0.0, s0, opts)?;
        let ms = crossing_form_s(&c, p)?;
        gamma2_signatures.push((s0, ms.signature));
    }
    let gamma2_index: i32 = gamma2_signatures.iter().map(|x| x.1).sum();
    if gamma2_index != qq as i32 - pp as i32 {
        return Err(Error::Degenerate(format!(
            "left-side signatures sum to {gamma2_index}, expected Q - P = {}",
            qq as i32 - pp as i32
        )));
    }

    let mut kernel_at_one = None;
    let mut concavity_report = None;
    let mut arrival_check = None;
    let corner_c = if cg.endpoint || ch.endpoint {
        let c = spectra::crossing_at(p, 0.0, 1.0, opts)?;
        kernel_at_one = Some(c.which_kernel);
        let conc = concavity(&c, p)?;
        let corner = correction_term(Some(&c), Some(&conc));
        if let (Ok(cc), false) = (&corner, conc.isolated) {
            if let Ok(m2) = second_order_form(&c, p) {
                let dim_lminus = usize::from(ch.endpoint) as i32;
                arrival_check = Some((cc - dim_lminus, -(m2.form.n_minus as i32)));
            }
        }
        concavity_report = Some(conc);
        corner?
    } else {
        0
    };
    let gamma3_index = pp as i32 - qq as i32 - corner_c;

    let lam_inf = 1.05 * p.sup_norm() + 1.0;
    let eps = 1e-3 * lam_inf;
    let roots = spectra::real_eigenvalues(p, 1.0, [eps, lam_inf], opts)?;
    let mut recount = Some(0);
    let mut positive = Vec::new();
    for r in &roots {
        positive.push(r.lambda0);
        let ml = crossing_form_lambda(r)?;
        recount = match (recount, ml.n_zero) {
            (Some(t), 0) => Some(t + ml.signature),
            _ => None,
        };
    }
    Ok(MaslovBoxReport {
        p: pp,
        q: qq,
        gamma2_index,
        gamma2_signatures,
        corner_c,
        gamma3_index,
        lower_bound: gamma3_index.unsigned_abs(),
        kernel_at_one,
        concavity: concavity_report,
        arrival_check,
        gamma3_recount: recount,
        positive_real_eigenvalues: positive,
    })
}

#[cfg(test)]
mod tests;
