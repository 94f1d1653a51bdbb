//! Standing waves `φ'' + f(φ²)φ + βφ = 0` on `[0, ℓ]` with Dirichlet or
//! Neumann ends, and the potential pair of their linearization.

mod elliptic;
pub mod jacobi;
mod nonlinearity;
mod potential;

use serde::{Deserialize, Serialize};

pub use elliptic::{cubic_closed_form, elliptic_wave, CubicOrbit, EllipticFamily, EllipticKind};
pub use jacobi::{complete_k, eval_jacobi};
pub use nonlinearity::{CustomNonlinearity, Nonlinearity};
pub use potential::{PotentialPair, Provenance, Scalar};

use crate::error::{Error, Result};
use crate::grid::{self, GridFn, QuinticHermite};
use crate::ode::{self, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

/// Which phase-plane orbit to shoot for.
///
/// The free initial value is the slope `b₀ = φ'(0)` for Dirichlet ends and
/// the amplitude `a₀ = φ(0)` for Neumann ends; it is searched in `range`.
/// Among solutions with the requested number of interior critical points the
/// one of smallest amplitude wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub range: [f64; 2],
    pub interior_critical_points: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct WaveOptions {
    /// Number of grid intervals.
    pub grid: usize,
    /// Coarse scan resolution over the branch range.
    pub scan: usize,
    pub tol: Tolerance,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self { grid: 1024, scan: 200, tol: Tolerance::default() }
    }
}

#[derive(Debug, Clone)]
pub struct StandingWave {
    pub beta: f64,
    pub ell: f64,
    pub bc: Bc,
    pub nonlinearity: Nonlinearity,
    pub branch: Branch,
    pub a0: f64,
    pub b0: f64,
    /// `φ` and `φ'` on the uniform grid.
    pub profile: GridFn,
    /// Sup distance to the closed-form elliptic solution, relative to `max|φ|`,
    /// when the nonlinearity is cubic and the orbit is bounded.
    pub closed_form_discrepancy: Option<f64>,
}

fn wave_rhs<'a>(f: &'a Nonlinearity, beta: f64) -> impl Fn(f64, &[f64; 2], &mut [f64; 2]) + 'a {
    move |_, y, dy| {
        dy[0] = y[1];
        dy[1] = -(f.f(y[0] * y[0]) + beta) * y[0];
    }
}

fn initial_point(bc: Bc, theta: f64) -> [f64; 2] {
    match bc {
        Bc::Dirichlet => [0.0, theta],
        Bc::Neumann => [theta, 0.0],
    }
}

fn end_residual(bc: Bc, y: &[f64; 2]) -> f64 {
    match bc {
        Bc::Dirichlet => y[0],
        Bc::Neumann => y[1],
    }
}

pub fn solve_standing_wave(f: &Nonlinearity, beta: f64, ell: f64, bc: Bc, branch: Branch) -> Result<StandingWave> {
    solve_standing_wave_with(f, beta, ell, bc, branch, &WaveOptions::default())
}

pub fn solve_standing_wave_with(
    f: &Nonlinearity,
    beta: f64,
    ell: f64,
    bc: Bc,
    branch: Branch,
    opts: &WaveOptions,
) -> Result<StandingWave> {
    f.validate()?;
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidInput(format!("interval length must be positive, got {ell}")));
    }
    let [lo, hi] = branch.range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("branch range [{lo}, {hi}] is empty")));
    }
    if opts.grid < 512 {
        return Err(Error::InvalidInput(format!("wave grid needs at least 512 intervals, got {}", opts.grid)));
    }

    let rhs = wave_rhs(f, beta);
    let residual = |theta: f64| -> Option<f64> {
        ode::integrate_to(&rhs, 0.0, initial_point(bc, theta), ell, opts.tol)
            .ok()
            .map(|y| end_residual(bc, &y))
            .filter(|r| r.is_finite())
    };

    let scan = opts.scan.max(2);
    let thetas: Vec<f64> = (0..=scan).map(|i| lo + (hi - lo) * i as f64 / scan as f64).collect();
    let values: Vec<Option<f64>> = thetas.iter().map(|&t| residual(t)).collect();

    let mut best: Option<StandingWave> = None;
    let mut best_amp = f64::INFINITY;
    for i in 0..scan {
        let (Some(ra), Some(rb)) = (values[i], values[i + 1]) else { continue };
        let root = if ra == 0.0 {
            thetas[i]
        } else if ra * rb < 0.0 {
            bisect(&residual, thetas[i], thetas[i + 1], ra)
        } else {
            continue;
        };
        let wave = sample_wave(f, beta, ell, bc, branch, root, opts)?;
        if wave.interior_critical_points() != branch.interior_critical_points {
            continue;
        }
        let amp = wave.profile.sup_norm();
        if amp < best_amp {
            best_amp = amp;
            best = Some(wave);
        }
    }
    if (values[scan] == Some(0.0)) && best.is_none() {
        let wave = sample_wave(f, beta, ell, bc, branch, thetas[scan], opts)?;
        if wave.interior_critical_points() == branch.interior_critical_points {
            best = Some(wave);
        }
    }

    let mut wave = best.ok_or_else(|| {
        Error::Shooting(format!(
            "no {:?} orbit with {} interior critical points for initial value in [{lo}, {hi}] (beta={beta}, ell={ell})",
            bc, branch.interior_critical_points
        ))
    })?;
    f.check_derivative(wave.profile.sup_norm().powi(2))?;

    if let Some(sigma) = f.cubic_sign() {
        if let Some(orbit) = cubic_closed_form(sigma, beta, wave.a0, wave.b0) {
            let scale = wave.profile.sup_norm().max(f64::MIN_POSITIVE);
            let err = (0..=opts.grid)
                .map(|i| (orbit.eval(wave.profile.x(i)).0 - wave.profile.val[i]).abs())
                .fold(0.0, f64::max)
                / scale;
            if err > 1e-7 {
                return Err(Error::Shooting(format!(
                    "integrated wave departs from the elliptic closed form by {err:.3e}"
                )));
            }
            wave.closed_form_discrepancy = Some(err);
        }
    }
    Ok(wave)
}

fn bisect(residual: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut ra: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let Some(rm) = residual(mid) else { break };
        if rm == 0.0 {
            return mid;
        }
        if (rm < 0.0) == (ra < 0.0) {
            a = mid;
            ra = rm;
        } else {
            b = mid;
        }
    }
    let (fa, fb) = (residual(a).unwrap_or(f64::INFINITY), residual(b).unwrap_or(f64::INFINITY));
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

fn sample_wave(
    f: &Nonlinearity,
    beta: f64,
    ell: f64,
    bc: Bc,
    branch: Branch,
    theta: f64,
    opts: &WaveOptions,
) -> Result<StandingWave> {
    let n = opts.grid;
    let xs: Vec<f64> = grid::nodes(ell, n).skip(1).collect();
    let y0 = initial_point(bc, theta);
    let states = ode::integrate_samples(wave_rhs(f, beta), 0.0, y0, &xs, opts.tol)
        .map_err(|e| Error::Shooting(format!("wave integration failed at x={}: {}", e.x, e.reason)))?;
    let mut val = vec![y0[0]];
    let mut der = vec![y0[1]];
    for s in &states {
        val.push(s[0]);
        der.push(s[1]);
    }
    Ok(StandingWave {
        beta,
        ell,
        bc,
        nonlinearity: f.clone(),
        branch,
        a0: y0[0],
        b0: y0[1],
        profile: GridFn::new(ell, val, der),
        closed_form_discrepancy: None,
    })
}

fn count_sign_changes(v: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &x in v {
        if x == 0.0 {
            continue;
        }
        if prev != 0.0 && (x < 0.0) != (prev < 0.0) {
            count += 1;
        }
        prev = x;
    }
    count
}

impl StandingWave {
    pub fn grid(&self) -> usize {
        self.profile.intervals()
    }

    pub fn amplitude(&self) -> f64 {
        self.profile.sup_norm()
    }

    /// Sign changes of `φ'` strictly inside the interval.
    pub fn interior_critical_points(&self) -> usize {
        let n = self.grid();
        let d = &self.profile.der[1..n];
        let scale = self.profile.der.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cleaned: Vec<f64> = d.iter().map(|&v| if v.abs() <= 1e-12 * scale { 0.0 } else { v }).collect();
        count_sign_changes(&cleaned)
    }

    pub fn interior_zeros(&self) -> usize {
        let n = self.grid();
        let scale = self.amplitude();
        let cleaned: Vec<f64> =
            self.profile.val[1..n].iter().map(|&v| if v.abs() <= 1e-12 * scale { 0.0 } else { v }).collect();
        count_sign_changes(&cleaned)
    }

    pub fn is_nonvanishing(&self) -> bool {
        let v = &self.profile.val;
        v.iter().all(|&x| x > 0.0) || v.iter().all(|&x| x < 0.0)
    }

    pub fn is_constant(&self) -> bool {
        let scale = self.amplitude().max(1.0);
        self.profile.der.iter().all(|d| d.abs() <= 1e-10 * scale)
    }

    /// `φ''` from the equation itself.
    pub fn second_derivative(&self, phi: f64) -> f64 {
        -(self.nonlinearity.f(phi * phi) + self.beta) * phi
    }

    /// Sup-norm residual of the profile equation at interior nodes, with `φ''`
    /// from high-order differences of the sampled `φ'`, relative to `max|φ|`.
    pub fn equation_residual(&self) -> f64 {
        let n = self.grid();
        let d2 = grid::differentiate(&self.profile.der, self.profile.step(), 9);
        let scale = self.amplitude().max(f64::MIN_POSITIVE);
        (1..n)
            .map(|i| (d2[i] - self.second_derivative(self.profile.val[i])).abs())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn hamiltonian(&self, phi: f64, dphi: f64) -> f64 {
        0.5 * dphi * dphi + 0.5 * self.beta * phi * phi + 0.5 * self.nonlinearity.antiderivative(phi * phi)
    }

    /// Largest deviation of the conserved energy from its initial value,
    /// relative to the largest energy term along the orbit.
    pub fn hamiltonian_drift(&self) -> f64 {
        let v = &self.profile.val;
        let d = &self.profile.der;
        let h0 = self.hamiltonian(v[0], d[0]);
        let mut scale = f64::MIN_POSITIVE;
        let mut drift = 0.0f64;
        for i in 0..v.len() {
            let r = v[i] * v[i];
            scale = scale
                .max(0.5 * d[i] * d[i])
                .max((0.5 * self.beta * r).abs())
                .max((0.5 * self.nonlinearity.antiderivative(r)).abs());
            drift = drift.max((self.hamiltonian(v[i], d[i]) - h0).abs());
        }
        drift / scale
    }

    /// The boundary quantity that must vanish (`φ` or `φ'`) at both ends,
    /// relative to `max|φ|`.
    pub fn boundary_residual(&self) -> f64 {
        let scale = self.amplitude().max(f64::MIN_POSITIVE);
        let (a, b) = match self.bc {
            Bc::Dirichlet => (self.profile.val[0], self.profile.last().0),
            Bc::Neumann => (self.profile.der[0], self.profile.last().1),
        };
        a.abs().max(b.abs()) / scale
    }

    /// `L₋φ` (Dirichlet) or `L₊φ'` (Neumann) applied with high-order
    /// differences; the sup norm relative to that of the kernel function.
    pub fn kernel_residual(&self) -> f64 {
        let n = self.grid();
        let h = self.profile.step();
        let (w, q): (Vec<f64>, Box<dyn Fn(f64) -> f64>) = match self.bc {
            Bc::Dirichlet => (
                self.profile.val.clone(),
                Box::new(|phi: f64| self.nonlinearity.f(phi * phi) + self.beta),
            ),
            Bc::Neumann => (
                self.profile.der.clone(),
                Box::new(|phi: f64| self.nonlinearity.g_of_r(phi * phi, self.beta)),
            ),
        };
        let width = 9;
        let scale = w.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 1..n {
            let start = i.saturating_sub(width / 2).min(n + 1 - width);
            let xs: Vec<f64> = (start..start + width).map(|j| (j as f64 - i as f64) * h).collect();
            let wts = grid::fd_weights(0.0, &xs, 2);
            let d2: f64 = wts.iter().zip(&w[start..start + width]).map(|(a, b)| a * b).sum();
            let lw = -d2 - q(self.profile.val[i]) * w[i];
            worst = worst.max(lw.abs());
        }
        worst / scale
    }

    pub fn to_json(&self) -> WaveJson {
        WaveJson {
            beta: self.beta,
            ell: self.ell,
            bc: self.bc,
            nonlinearity: self.nonlinearity.clone(),
            branch: BranchJson { branch: self.branch, a0: self.a0, b0: self.b0 },
            grid: (0..=self.grid())
                .map(|i| WaveSample { x: self.profile.x(i), phi: self.profile.val[i], dphi: self.profile.der[i] })
                .collect(),
        }
    }

    pub fn from_json(j: WaveJson) -> Result<Self> {
        if j.grid.len() < 513 {
            return Err(Error::InvalidInput(format!("wave grid has {} samples, need at least 513", j.grid.len())));
        }
        let n = j.grid.len() - 1;
        for (i, s) in j.grid.iter().enumerate() {
            let expect = j.ell * i as f64 / n as f64;
            if (s.x - expect).abs() > 1e-9 * j.ell {
                return Err(Error::InvalidInput(format!("wave grid is not uniform at sample {i}")));
            }
        }
        Ok(Self {
            beta: j.beta,
            ell: j.ell,
            bc: j.bc,
            nonlinearity: j.nonlinearity,
            branch: j.branch.branch,
            a0: j.branch.a0,
            b0: j.branch.b0,
            profile: GridFn::new(j.ell, j.grid.iter().map(|s| s.phi).collect(), j.grid.iter().map(|s| s.dphi).collect()),
            closed_form_discrepancy: None,
        })
    }

    /// Continue the wave to a nearby `beta`, keeping the boundary conditions
    /// and `ell`, with the current orbit as predictor.
    pub fn continue_to(&self, beta: f64, opts: &WaveOptions) -> Result<StandingWave> {
        let theta = match self.bc {
            Bc::Dirichlet => self.b0,
            Bc::Neumann => self.a0,
        };
        let width = 1e-2 * theta.abs().max(1e-3) + 10.0 * (beta - self.beta).abs();
        let branch = Branch {
            range: [theta - width, theta + width],
            interior_critical_points: self.branch.interior_critical_points,
        };
        let o = WaveOptions { scan: 16, grid: self.grid(), ..*opts };
        let mut w = solve_standing_wave_with(&self.nonlinearity, beta, self.ell, self.bc, branch, &o)
            .map_err(|e| Error::Continuation(format!("beta={beta}: {e}")))?;
        w.branch = self.branch;
        Ok(w)
    }

    /// The solution with the same initial data at `beta`. It generally
    /// violates the boundary condition at `ℓ`.
    pub fn initial_value_family(&self, beta: f64, opts: &WaveOptions) -> Result<StandingWave> {
        let theta = match self.bc {
            Bc::Dirichlet => self.b0,
            Bc::Neumann => self.a0,
        };
        let o = WaveOptions { grid: self.grid(), ..*opts };
        sample_wave(&self.nonlinearity, beta, self.ell, self.bc, self.branch, theta, &o)
    }

    /// Mass `∫ φ²`.
    pub fn mass(&self) -> f64 {
        self.profile.dot(&self.profile)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSample {
    pub x: f64,
    pub phi: f64,
    pub dphi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchJson {
    #[serde(flatten)]
    pub branch: Branch,
    pub a0: f64,
    pub b0: f64,
}

/// Interchange form of a [`StandingWave`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveJson {
    pub beta: f64,
    pub ell: f64,
    pub bc: Bc,
    pub nonlinearity: Nonlinearity,
    pub branch: BranchJson,
    pub grid: Vec<WaveSample>,
}

/// Fraction of `ell` by which potentials of a wave are continued past the
/// right end, so that rescalings slightly above 1 can be evaluated.
pub const POTENTIAL_EXTENSION: f64 = 0.25;

/// The pair `g = 2f'(φ²)φ² + f(φ²) + β`, `h = f(φ²) + β`.
pub fn linearized_potentials(w: &StandingWave) -> Result<PotentialPair> {
    let n = w.grid();
    let hstep = w.profile.step();
    let provenance = Provenance::FromWave(Box::new(w.clone()));
    if w.profile.val.iter().chain(&w.profile.der).all(|&v| v == 0.0) && w.nonlinearity.f(0.0) == 0.0 {
        return Ok(PotentialPair {
            g: Scalar::constant(w.beta),
            h: Scalar::constant(w.beta),
            ell: w.ell,
            reach: f64::INFINITY,
            provenance,
        });
    }

    let extra = (POTENTIAL_EXTENSION * n as f64).ceil() as usize;
    let stops: Vec<f64> = (1..=extra).map(|k| w.ell + k as f64 * hstep).collect();
    let (phi_l, dphi_l) = w.profile.last();
    let tail = ode::integrate_samples(wave_rhs(&w.nonlinearity, w.beta), w.ell, [phi_l, dphi_l], &stops, Tolerance::default())
        .map_err(|e| Error::Shooting(format!("continuing the wave past ell failed at x={}: {}", e.x, e.reason)))?;

    let mut y = w.profile.val.clone();
    let mut dy = w.profile.der.clone();
    for s in &tail {
        y.push(s[0]);
        dy.push(s[1]);
    }
    let d2y: Vec<f64> = y.iter().map(|&p| w.second_derivative(p)).collect();
    let interp = std::sync::Arc::new(QuinticHermite { h: hstep, y, dy, d2y });
    let reach = interp.reach();

    let (f1, i1, beta) = (w.nonlinearity.clone(), interp.clone(), w.beta);
    let g = Scalar::new(move |x| {
        let (p, dp) = i1.eval(x);
        let r = p * p;
        (f1.g_of_r(r, beta), f1.dg_dr(r) * 2.0 * p * dp)
    });
    let (f2, i2) = (w.nonlinearity.clone(), interp);
    let h = Scalar::new(move |x| {
        let (p, dp) = i2.eval(x);
        let r = p * p;
        (f2.f(r) + beta, f2.df(r) * 2.0 * p * dp)
    });
    Ok(PotentialPair { g, h, ell: w.ell, reach, provenance })
}

#[cfg(test)]
mod tests;
