//! Real eigenvalue curves of the rescaled problem: the characteristic
//! determinant `det X(ℓ; λ, s)`, its zeros in `λ` at fixed `s`, conjugate
//! points in `s` at `λ = 0`, curve tracing in the `λs`-plane and an
//! independent finite-difference spectrum.

mod curves;
mod oracle;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

pub use curves::{det_grid, trace_branch, trace_curves, CurveOptions, EigenvalueCurve, Rect};
pub use oracle::{fd_scalar_eigenvalues, fd_spectrum, OracleEigenvalue};

use crate::error::{Error, Result};
use crate::hamflow::{self, SampledPair};
use crate::ode::{self, Tolerance};
use crate::waves::{PotentialPair, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct SpectraOptions {
    pub tol: Tolerance,
    /// Scan points across the `λ` window.
    pub scan_steps: usize,
    /// Absolute bisection tolerance on roots.
    pub root_tol: f64,
    /// Singular values of `X` below this fraction of `‖[X; Y]‖` span the kernel.
    pub kernel_rel: f64,
    /// Minima of `|det X|` below this fraction of the local scale are
    /// examined as tangential zeros.
    pub tangency_rel: f64,
    /// Grid intervals for sampled eigenfunctions.
    pub samples: usize,
}

impl Default for SpectraOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            scan_steps: 2000,
            root_tol: 1e-10,
            kernel_rel: 1e-8,
            tangency_rel: 1e-6,
            samples: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichKernel {
    Lplus,
    Lminus,
    Both,
    Coupled,
}

/// A point `(λ₀, s₀)` with `s₀²λ₀ ∈ Spec(N_{s₀})` and its eigenfunctions.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub lambda0: f64,
    pub s0: f64,
    pub kernel_dim: usize,
    /// Eigenfunctions normalized to `∫u² + v² = 1`.
    pub kernel: Vec<SampledPair>,
    /// L² norms of the raw solutions before normalization.
    pub raw_norms: Vec<f64>,
    pub which_kernel: WhichKernel,
    /// Smallest singular value of `X(ℓ)` relative to `‖[X; Y]‖`.
    pub residual: f64,
}

impl Crossing {
    pub fn ell(&self) -> f64 {
        self.kernel[0].u.ell
    }
}

/// `det X(ℓ; λ, s)`.
pub fn char_det(p: &PotentialPair, lambda: f64, s: f64) -> Result<f64> {
    char_det_with(p, lambda, s, Tolerance::default())
}

pub fn char_det_with(p: &PotentialPair, lambda: f64, s: f64, tol: Tolerance) -> Result<f64> {
    Ok(hamflow::slope_columns(p, lambda, s, tol)?.0.determinant())
}

/// `det X` and the local scale `‖[X; Y]‖²_F` it should be compared with.
pub fn char_det_scaled(p: &PotentialPair, lambda: f64, s: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let (x, y) = hamflow::slope_columns(p, lambda, s, tol)?;
    Ok((x.determinant(), x.norm_squared() + y.norm_squared()))
}

/// All real `λ` in `window` with `s²λ ∈ Spec(N_s)`.
pub fn real_eigenvalues(p: &PotentialPair, s: f64, window: [f64; 2], opts: &SpectraOptions) -> Result<Vec<Crossing>> {
    let [a, b] = window;
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty lambda window [{a}, {b}]")));
    }
    let n = opts.scan_steps.max(4);
    let lams: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let step = (b - a) / n as f64;
    let vals: Vec<(f64, f64)> =
        lams.iter().map(|&l| char_det_scaled(p, l, s, opts.tol)).collect::<Result<_>>()?;
    let det = |l: f64| char_det_with(p, l, s, opts.tol);

    let mut roots: Vec<f64> = Vec::new();
    let zero_in_window = a <= 0.0 && 0.0 <= b;
    if zero_in_window && kernel_dim_at(p, 0.0, s, opts)? > 0 {
        roots.push(0.0);
    }
    let near_existing = |roots: &[f64], l: f64| roots.iter().any(|r| (r - l).abs() < 2.0 * step);

    for i in 0..n {
        let (da, db) = (vals[i].0, vals[i + 1].0);
        if da == 0.0 {
            if !near_existing(&roots, lams[i]) {
                roots.push(lams[i]);
            }
            continue;
        }
        if da * db < 0.0 {
            let r = bisect(&det, lams[i], lams[i + 1], da, opts.root_tol)?;
            if !near_existing(&roots, r) {
                roots.push(r);
            }
        }
    }
    if vals[n].0 == 0.0 && !near_existing(&roots, lams[n]) {
        roots.push(lams[n]);
    }

    // Even-order zeros: local minima of |det|/scale without a sign change.
    for i in 1..n {
        let r = |k: usize| vals[k].0.abs() / vals[k].1;
        let (dl, dm, dr) = (vals[i - 1].0, vals[i].0, vals[i + 1].0);
        if dl * dm <= 0.0 || dm * dr <= 0.0 {
            continue;
        }
        if !(r(i) <= r(i - 1) && r(i) <= r(i + 1) && r(i) < opts.tangency_rel) {
            continue;
        }
        if near_existing(&roots, lams[i]) {
            continue;
        }
        let l = golden_min(|l| det(l).map(f64::abs), lams[i - 1], lams[i + 1], opts.root_tol)?;
        if kernel_dim_at(p, l, s, opts)? > 0 {
            roots.push(l);
        }
    }

    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.iter().map(|&l| crossing_at(p, l, s, opts)).collect()
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        // Keep going well past `tol`: roots are cheap to polish to round-off.
        if b - a < 1e-6 * tol {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Null space of `X(ℓ)` and the relative size of its smallest singular value.
fn kernel_basis(x: &Matrix2<f64>, y: &Matrix2<f64>, lambda: f64, rel: f64) -> (Vec<Vector2<f64>>, f64) {
    let scale = (x.norm_squared() + y.norm_squared()).sqrt();
    if lambda == 0.0 {
        // The system decouples: X is diagonal, u-kernel first.
        let mut basis = Vec::new();
        let d = [x[(0, 0)].abs(), x[(1, 1)].abs()];
        for (k, &dk) in d.iter().enumerate() {
            if dk < rel * scale {
                basis.push(if k == 0 { Vector2::new(1.0, 0.0) } else { Vector2::new(0.0, 1.0) });
            }
        }
        return (basis, d[0].min(d[1]) / scale);
    }
    let svd = x.svd(false, true);
    let vt = svd.v_t.unwrap();
    let mut idx: Vec<usize> = vec![0, 1];
    idx.sort_by(|&i, &j| svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap());
    let basis = idx
        .iter()
        .filter(|&&i| svd.singular_values[i] < rel * scale)
        .map(|&i| vt.row(i).transpose())
        .collect();
    (basis, svd.singular_values[idx[0]] / scale)
}

fn kernel_dim_at(p: &PotentialPair, lambda: f64, s: f64, opts: &SpectraOptions) -> Result<usize> {
    let (x, y) = hamflow::slope_columns(p, lambda, s, opts.tol)?;
    Ok(kernel_basis(&x, &y, lambda, opts.kernel_rel).0.len())
}

/// Package a known root as a [`Crossing`] with sampled, normalized eigenfunctions.
pub fn crossing_at(p: &PotentialPair, lambda: f64, s: f64, opts: &SpectraOptions) -> Result<Crossing> {
    let (x, y) = hamflow::slope_columns(p, lambda, s, opts.tol)?;
    let (mut basis, residual) = kernel_basis(&x, &y, lambda, opts.kernel_rel);
    if basis.is_empty() {
        if lambda == 0.0 {
            let k = if x[(0, 0)].abs() <= x[(1, 1)].abs() { 0 } else { 1 };
            basis.push(if k == 0 { Vector2::new(1.0, 0.0) } else { Vector2::new(0.0, 1.0) });
        } else {
            let svd = x.svd(false, true);
            let vt = svd.v_t.unwrap();
            let i = if svd.singular_values[0] <= svd.singular_values[1] { 0 } else { 1 };
            basis.push(vt.row(i).transpose());
        }
    }
    let mut kernel = Vec::new();
    let mut raw_norms = Vec::new();
    for c in &basis {
        let pair = hamflow::solve_sampled(p, lambda, s, [0.0, 0.0, c[0], c[1]], opts.samples, opts.tol)?;
        let (normed, n) = pair.normalized();
        kernel.push(normed);
        raw_norms.push(n);
    }
    let which_kernel = if lambda != 0.0 {
        WhichKernel::Coupled
    } else if basis.len() == 2 {
        WhichKernel::Both
    } else if basis[0][0] != 0.0 {
        WhichKernel::Lplus
    } else {
        WhichKernel::Lminus
    };
    Ok(Crossing { lambda0: lambda, s0: s, kernel_dim: basis.len(), kernel, raw_norms, which_kernel, residual })
}

/// Conjugate points of the scalar operator `-∂ₓₓ - q` on `[0, ℓ]`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugatePoints {
    /// All `s₀ ∈ (0, 1)` with `0 ∈ Spec(-∂ₓₓ - s₀² q(s₀ ·))` on `[0, ℓ]`.
    pub interior: Vec<f64>,
    /// Whether `s = 1` itself is a conjugate point (a kernel at the end).
    pub endpoint: bool,
}

/// The rescaled problem at `s` has a kernel exactly when the solution of
/// `w'' + q w = 0`, `w(0) = 0`, `w'(0) = 1` vanishes at `s ℓ`; the zeros of
/// that single solution are the conjugate points.
pub fn conjugate_points(q: &Scalar, ell: f64) -> Result<ConjugatePoints> {
    conjugate_points_with(q, ell, Tolerance::default())
}

pub fn conjugate_points_with(q: &Scalar, ell: f64, tol: Tolerance) -> Result<ConjugatePoints> {
    if !(ell > 0.0) {
        return Err(Error::InvalidInput(format!("interval length must be positive, got {ell}")));
    }
    let rhs = |x: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
        dy[0] = y[1];
        dy[1] = -q.value(x) * y[0];
    };
    let qmax = q.sup_norm_on(ell);
    // Zeros are at least π/√max q apart; sample several times finer.
    let m = (1000.0f64).max(8.0 * ell * qmax.sqrt() / std::f64::consts::PI).ceil() as usize;
    let xs: Vec<f64> = (1..=m).map(|i| ell * i as f64 / m as f64).collect();
    let err = |e: ode::OdeError| Error::Integration { lambda: 0.0, s: e.x / ell, reason: e.reason.into() };
    let states = ode::integrate_samples(rhs, 0.0, [0.0, 1.0], &xs, tol).map_err(err)?;

    let (wl, dwl) = (states[m - 1][0], states[m - 1][1]);
    let endpoint = wl.abs() <= 1e-8 * ell * dwl.abs();

    let mut interior = Vec::new();
    let mut prev_x = 0.0;
    let mut prev = [0.0, 1.0];
    for (i, st) in states.iter().enumerate() {
        let x = xs[i];
        // A zero at the start node (w(0)=0) is not a conjugate point.
        if prev_x > 0.0 && prev[0] * st[0] < 0.0 || (prev_x > 0.0 && st[0] == 0.0) {
            let (mut a, mut b, mut ya) = (prev_x, x, prev);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let ym = ode::integrate_to(rhs, a, ya, mid, tol).map_err(err)?;
                if (ym[0] < 0.0) == (ya[0] < 0.0) && ym[0] != 0.0 {
                    a = mid;
                    ya = ym;
                } else {
                    b = mid;
                }
            }
            let root = 0.5 * (a + b);
            if (ell - root).abs() > 1e-8 * ell {
                interior.push(root / ell);
            }
        }
        prev_x = x;
        prev = *st;
    }
    Ok(ConjugatePoints { interior, endpoint })
}

/// Number of negative Dirichlet eigenvalues of `-∂ₓₓ - q` on `[0, ℓ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MorseIndex {
    pub count: usize,
    /// A conjugate point at `s = 1`: zero is an eigenvalue and is not counted.
    pub endpoint_kernel: bool,
}

pub fn morse_index(q: &Scalar, ell: f64) -> Result<MorseIndex> {
    let c = conjugate_points(q, ell)?;
    Ok(MorseIndex { count: c.interior.len(), endpoint_kernel: c.endpoint })
}

#[cfg(test)]
mod tests;
