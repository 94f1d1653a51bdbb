//! Closed-form bounded orbits of the cubic equation `φ'' + σφ³ + βφ = 0`.

use serde::{Deserialize, Serialize};

use super::jacobi::{complete_k, eval_jacobi};
use super::{solve_standing_wave_with, Bc, Branch, Nonlinearity, StandingWave, WaveOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipticKind {
    Dn,
    Cn,
    Sn,
}

/// `φ(x) = sign · a · E(b x + phase | m)` with `E ∈ {dn, cn, sn}`.
#[derive(Debug, Clone, Copy)]
pub struct CubicOrbit {
    pub kind: EllipticKind,
    pub sign: f64,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub phase: f64,
}

impl CubicOrbit {
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (sn, cn, dn) = eval_jacobi(self.b * x + self.phase, self.m);
        let (e, de) = match self.kind {
            EllipticKind::Dn => (dn, -self.m * sn * cn),
            EllipticKind::Cn => (cn, -sn * dn),
            EllipticKind::Sn => (sn, cn * dn),
        };
        (self.sign * self.a * e, self.sign * self.a * self.b * de)
    }

    pub fn period(&self) -> f64 {
        let k = complete_k(self.m);
        match self.kind {
            EllipticKind::Dn => 2.0 * k / self.b,
            EllipticKind::Cn | EllipticKind::Sn => 4.0 * k / self.b,
        }
    }

    fn shape(&self, u: f64) -> f64 {
        let (sn, cn, dn) = eval_jacobi(u, self.m);
        match self.kind {
            EllipticKind::Dn => dn,
            EllipticKind::Cn => cn,
            EllipticKind::Sn => sn,
        }
    }
}

/// The elliptic-function orbit through `(φ(0), φ'(0)) = (a0, b0)` of
/// `φ'' + σφ³ + βφ = 0`, if that orbit is bounded and nonconstant.
pub fn cubic_closed_form(sigma: f64, beta: f64, a0: f64, b0: f64) -> Option<CubicOrbit> {
    let energy = 0.5 * b0 * b0 + 0.5 * beta * a0 * a0 + 0.25 * sigma * a0.powi(4);
    let (kind, a, m) = if sigma > 0.0 {
        let a2 = -beta + (beta * beta + 4.0 * energy).max(0.0).sqrt();
        if energy < 0.0 && beta < 0.0 {
            (EllipticKind::Dn, a2.sqrt(), 2.0 + 2.0 * beta / a2)
        } else if energy > 0.0 {
            (EllipticKind::Cn, a2.sqrt(), a2 / (2.0 * (a2 + beta)))
        } else {
            return None;
        }
    } else {
        let disc = beta * beta - 4.0 * energy;
        if !(beta > 0.0 && energy > 0.0 && disc > 0.0 && a0 * a0 < beta) {
            return None;
        }
        let a2 = beta - disc.sqrt();
        (EllipticKind::Sn, a2.sqrt(), a2 / (2.0 * beta - a2))
    };
    if !(m > 1e-12 && m < 1.0 && a > 1e-300) {
        return None;
    }
    let b = match kind {
        EllipticKind::Dn => a / 2f64.sqrt(),
        _ => a / (2.0 * m).sqrt(),
    };

    let (sign, a0, b0) = if kind == EllipticKind::Dn && a0 < 0.0 { (-1.0, -a0, -b0) } else { (1.0, a0, b0) };
    let k = complete_k(m);
    let mut orbit = CubicOrbit { kind, sign, a, b, m, phase: 0.0 };
    let (mut lo, mut hi, increasing) = match kind {
        EllipticKind::Dn => (0.0, k, false),
        EllipticKind::Cn => (0.0, 2.0 * k, false),
        EllipticKind::Sn => (-k, k, true),
    };
    let target = (a0 / a).clamp(-1.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (orbit.shape(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    match kind {
        EllipticKind::Dn | EllipticKind::Cn if b0 > 0.0 => u = -u,
        EllipticKind::Sn if b0 < 0.0 => u = 2.0 * k - u,
        _ => {}
    }
    orbit.phase = u;
    Some(orbit)
}

/// Named cubic families with the wave length given in half-periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipticFamily {
    /// Focusing, `β < 0`, nonvanishing; Neumann ends only.
    Dnoidal,
    /// Focusing, sign-changing.
    Cnoidal,
    /// Defocusing, `β > 0`, sign-changing.
    Snoidal,
}

/// Shoot for the cubic wave of the given family and elliptic parameter `m`
/// whose length is `half_periods` half-periods, starting from the closed-form
/// initial data. Returns the wave and its full period.
pub fn elliptic_wave(
    family: EllipticFamily,
    beta: f64,
    m: f64,
    half_periods: usize,
    bc: Bc,
    opts: &WaveOptions,
) -> Result<(StandingWave, f64)> {
    if !(m > 0.0 && m < 1.0) || half_periods == 0 {
        return Err(Error::InvalidInput(format!("need 0 < m < 1 and half_periods ≥ 1, got m={m}, {half_periods}")));
    }
    let k = complete_k(m);
    let (b2, nonlinearity) = match family {
        EllipticFamily::Dnoidal => (-beta / (2.0 - m), Nonlinearity::CubicFocusing),
        EllipticFamily::Cnoidal => (-beta / (2.0 * m - 1.0), Nonlinearity::CubicFocusing),
        EllipticFamily::Snoidal => (beta / (1.0 + m), Nonlinearity::CubicDefocusing),
    };
    if !(b2 > 0.0 && b2.is_finite()) {
        return Err(Error::InvalidInput(format!("{family:?} family does not exist for beta={beta}, m={m}")));
    }
    let b = b2.sqrt();
    let (a, period) = match family {
        EllipticFamily::Dnoidal => (2f64.sqrt() * b, 2.0 * k / b),
        _ => ((2.0 * m).sqrt() * b, 4.0 * k / b),
    };
    let ell = half_periods as f64 * period / 2.0;
    let (theta, crit) = match (family, bc) {
        (EllipticFamily::Dnoidal, Bc::Dirichlet) => {
            return Err(Error::InvalidInput("dnoidal waves never vanish; use Neumann ends".into()))
        }
        (_, Bc::Neumann) => (a, half_periods - 1),
        (EllipticFamily::Cnoidal, Bc::Dirichlet) => (a * b * (1.0 - m).sqrt(), half_periods),
        (EllipticFamily::Snoidal, Bc::Dirichlet) => (a * b, half_periods),
    };
    let width = 1e-4 * theta;
    let branch = Branch { range: [theta - width, theta + width], interior_critical_points: crit };
    let o = WaveOptions { scan: opts.scan.min(16), ..*opts };
    let wave = solve_standing_wave_with(&nonlinearity, beta, ell, bc, branch, &o)?;
    Ok((wave, period))
}
