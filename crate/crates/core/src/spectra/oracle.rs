//! Second-order finite differences for `N_s` on interior nodes, used as an
//! independent check on the shooting method. Eigenvalues come from the
//! product `-L₋ L₊`, whose spectrum is `{Λ²}`, and are Richardson
//! extrapolated in `Λ²` over grids `h` and `h/2`.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::waves::{PotentialPair, Scalar};

/// An eigenvalue `λ` with `s²λ ∈ Spec(N_s)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleEigenvalue {
    pub re: f64,
    pub im: f64,
    /// Richardson error estimate for `λ`.
    pub error: f64,
    /// `⟨L z, z⟩ / ‖z‖²` for purely imaginary eigenvalues, when resolved.
    pub krein: Option<f64>,
}

impl OracleEigenvalue {
    pub fn is_real(&self, tol: f64) -> bool {
        self.im.abs() <= tol
    }

    pub fn is_imaginary(&self, tol: f64) -> bool {
        self.re.abs() <= tol && self.im.abs() > tol
    }
}

struct Discretization {
    h: f64,
    /// Diagonals of `L₊` and `L₋`; both have off-diagonal `-1/h²`.
    dp: Vec<f64>,
    dm: Vec<f64>,
}

impl Discretization {
    fn new(p: &PotentialPair, s: f64, n: usize) -> Self {
        let h = p.ell / (n + 1) as f64;
        let c = 2.0 / (h * h);
        let xs = (1..=n).map(|k| k as f64 * h);
        let dp = xs.clone().map(|x| c - s * s * p.g.value(s * x)).collect();
        let dm = xs.map(|x| c - s * s * p.h.value(s * x)).collect();
        Self { h, dp, dm }
    }

    fn n(&self) -> usize {
        self.dp.len()
    }

    fn off(&self) -> f64 {
        -1.0 / (self.h * self.h)
    }

    fn apply(&self, d: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let o = self.off();
        (0..n)
            .map(|i| {
                let mut y = d[i] * x[i];
                if i > 0 {
                    y += o * x[i - 1];
                }
                if i + 1 < n {
                    y += o * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Entry `(i, j)` of `-L₋ L₊`, zero outside `|i - j| ≤ 2`.
    fn product(&self, i: usize, j: usize) -> f64 {
        let o = self.off();
        let lm = |a: usize, b: usize| if a == b { self.dm[a] } else if a.abs_diff(b) == 1 { o } else { 0.0 };
        let lp = |a: usize, b: usize| if a == b { self.dp[a] } else if a.abs_diff(b) == 1 { o } else { 0.0 };
        let lo = i.saturating_sub(1).max(j.saturating_sub(1));
        let hi = (i + 1).min(j + 1).min(self.n() - 1);
        -(lo..=hi).map(|k| lm(i, k) * lp(k, j)).sum::<f64>()
    }

    fn product_eigenvalues(&self) -> Vec<Complex<f64>> {
        let n = self.n();
        let m = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) <= 2 { self.product(i, j) } else { 0.0 });
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// Krein value of the imaginary pair `Λ² = μ < 0`, from an eigenvector
    /// of `-L₋ L₊` found by inverse iteration.
    fn krein_value(&self, mu: f64) -> Option<f64> {
        let n = self.n();
        let shift = mu + 1e-10 * mu.abs().max(1.0);
        let mut band = Band::new(n, |i, j| self.product(i, j) - if i == j { shift } else { 0.0 });
        band.factor().ok()?;
        let mut u: Vec<f64> = (0..n).map(|k| 1.0 + 0.1 * ((k as f64) * 0.7).sin()).collect();
        for _ in 0..4 {
            u = band.solve(&u);
            let nrm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                return None;
            }
            u.iter_mut().for_each(|x| *x /= nrm);
        }
        let w2 = -mu;
        let lpu = self.apply(&self.dp, &u);
        let lmw = self.apply(&self.dm, &lpu);
        let dot = |a: &[f64], b: &[f64]| self.h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let form = dot(&u, &lpu) + dot(&lpu, &lmw) / w2;
        let norm = dot(&u, &u) + dot(&lpu, &lpu) / w2;
        let k = form / norm;
        (k.abs() > 1e-6).then_some(k)
    }
}

/// Eigenvalues of the rescaled operator at `s` on `n` interior nodes (and a
/// second grid of `2n + 1` nodes for extrapolation). Only modes that agree
/// between the two grids to a few percent are returned, sorted by modulus.
pub fn fd_spectrum(p: &PotentialPair, s: f64, n: usize) -> Result<Vec<OracleEigenvalue>> {
    if n < 8 {
        return Err(Error::InvalidInput(format!("finite-difference grid too small: {n}")));
    }
    if s * p.ell > p.reach * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!("s = {s} exceeds the reach of the potentials")));
    }
    let coarse = Discretization::new(p, s, n);
    let fine = Discretization::new(p, s, 2 * n + 1);
    let mc = coarse.product_eigenvalues();
    let mf = fine.product_eigenvalues();

    let floor = (s * s * p.sup_norm() + 1.0).powi(2);
    let mut out = Vec::new();
    for &c in &mc {
        let f = *mf
            .iter()
            .min_by(|a, b| (*a - c).norm().partial_cmp(&(*b - c).norm()).unwrap())
            .expect("nonempty spectrum");
        let diff = (f - c).norm();
        // Modes near zero are judged against the potential scale, not `|μ|`.
        if diff > 0.05 * f.norm().max(floor) {
            continue;
        }
        let mu = (f * 4.0 - c) / 3.0;
        // Snap round-off imaginary parts of real modes.
        let mu = if mu.im.abs() <= 1e-9 * mu.norm().max(1.0) { Complex::new(mu.re, 0.0) } else { mu };
        let root = mu.sqrt();
        let scale = 1.0 / (s * s);
        // dΛ = dμ / 2Λ, guarded near Λ = 0.
        let err = diff / 3.0 / (2.0 * root.norm()).max(diff.sqrt()) * scale;
        let krein = (mu.im == 0.0 && mu.re < 0.0).then(|| fine.krein_value(f.re)).flatten();
        for sign in [1.0, -1.0] {
            let l = root * sign * scale;
            out.push(OracleEigenvalue { re: l.re, im: l.im, error: err, krein });
        }
    }
    out.sort_by(|a, b| {
        let (ma, mb) = (a.re.hypot(a.im), b.re.hypot(b.im));
        ma.partial_cmp(&mb).unwrap().then(a.im.partial_cmp(&b.im).unwrap()).then(a.re.partial_cmp(&b.re).unwrap())
    });
    Ok(out)
}

/// Lowest `k` Dirichlet eigenvalues of `-∂ₓₓ - q` on `[0, ℓ]`, by Sturm
/// bisection on `n` and `2n + 1` interior nodes and Richardson extrapolation.
pub fn fd_scalar_eigenvalues(q: &Scalar, ell: f64, n: usize, k: usize) -> Vec<f64> {
    let lowest = |m: usize| -> Vec<f64> {
        let h = ell / (m + 1) as f64;
        let d: Vec<f64> = (1..=m).map(|i| 2.0 / (h * h) - q.value(i as f64 * h)).collect();
        let o2 = 1.0 / (h * h * h * h);
        // Number of eigenvalues below `x`: negative pivots of T - x.
        let count = |x: f64| {
            let mut c = 0;
            let mut piv = 1.0;
            for (i, &di) in d.iter().enumerate() {
                piv = di - x - if i > 0 { o2 / piv } else { 0.0 };
                if piv == 0.0 {
                    piv = -1e-300;
                }
                if piv < 0.0 {
                    c += 1;
                }
            }
            c
        };
        let lo0 = d.iter().fold(f64::INFINITY, |a, &b| a.min(b)) - 4.0 / (h * h);
        let hi0 = d.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) + 4.0 / (h * h);
        (0..k.min(m))
            .map(|j| {
                let (mut lo, mut hi) = (lo0, hi0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if count(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    };
    let c = lowest(n);
    let f = lowest(2 * n + 1);
    c.iter().zip(&f).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

/// Banded LU with partial pivoting for bandwidth two below and above.
/// Each row keeps a window of columns `[row - 4, row + 6]`, enough to hold
/// the fill-in and rows swapped in from below.
struct Band {
    n: usize,
    rows: Vec<[f64; 11]>,
    piv: Vec<usize>,
    l: Vec<[f64; 2]>,
}

impl Band {
    const LO: usize = 4;

    fn new(n: usize, a: impl Fn(usize, usize) -> f64) -> Self {
        let mut rows = vec![[0.0; 11]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                row[j + Self::LO - i] = a(i, j);
            }
        }
        Self { n, rows, piv: vec![0; n], l: vec![[0.0; 2]; n] }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let c = j as isize - i as isize + Self::LO as isize;
        if (0..11).contains(&c) { self.rows[i][c as usize] } else { 0.0 }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let c = j as isize - i as isize + Self::LO as isize;
        debug_assert!((0..11).contains(&c) || v == 0.0);
        if (0..11).contains(&c) {
            self.rows[i][c as usize] = v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let hi = (a.max(b) + 7).min(self.n);
        let lo = a.min(b).saturating_sub(4);
        let ra: Vec<f64> = (lo..hi).map(|j| self.get(a, j)).collect();
        let rb: Vec<f64> = (lo..hi).map(|j| self.get(b, j)).collect();
        self.rows[a] = [0.0; 11];
        self.rows[b] = [0.0; 11];
        for (k, j) in (lo..hi).enumerate() {
            self.set(a, j, rb[k]);
            self.set(b, j, ra[k]);
        }
    }

    fn factor(&mut self) -> std::result::Result<(), ()> {
        let n = self.n;
        for k in 0..n {
            let last = (k + 2).min(n - 1);
            let p = (k..=last)
                .max_by(|&a, &b| self.get(a, k).abs().partial_cmp(&self.get(b, k).abs()).unwrap())
                .unwrap();
            self.piv[k] = p;
            if p != k {
                self.swap_rows(k, p);
            }
            let d = self.get(k, k);
            if d == 0.0 {
                return Err(());
            }
            for (t, r) in (k + 1..=last).enumerate() {
                let m = self.get(r, k) / d;
                self.l[k][t] = m;
                self.set(r, k, 0.0);
                if m != 0.0 {
                    for j in k + 1..(k + 5).min(n) {
                        let v = self.get(r, j) - m * self.get(k, j);
                        self.set(r, j, v);
                    }
                }
            }
        }
        Ok(())
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            for t in 0..2 {
                let r = k + 1 + t;
                if r < n {
                    x[r] -= self.l[k][t] * x[k];
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..(i + 5).min(n) {
                acc -= self.get(i, j) * x[j];
            }
            x[i] = acc / self.get(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_solver_matches_dense() {
        let n = 40;
        let a = |i: usize, j: usize| {
            if i.abs_diff(j) > 2 {
                0.0
            } else {
                ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 }
            }
        };
        let mut band = Band::new(n, a);
        band.factor().unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = band.solve(&b);
        let dense = DMatrix::from_fn(n, n, a);
        let r = &dense * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(b);
        assert!(r.norm() < 1e-9, "residual {}", r.norm());
    }
}
