//! Run configuration, read from TOML or JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Tolerance;
use crate::spectra::{CurveOptions, Rect, SpectraOptions};
use crate::waves::{
    elliptic_wave, solve_standing_wave_with, Bc, Branch, EllipticFamily, Nonlinearity, PotentialPair, Scalar,
    StandingWave, WaveOptions,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    /// Seeds the random potentials of `check`.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    /// A standing wave found by shooting.
    Wave { nonlinearity: Nonlinearity, beta: f64, ell: f64, bc: Bc, branch: Branch },
    /// A cubic wave spanning a whole number of half-periods.
    Elliptic { family: EllipticFamily, beta: f64, m: f64, half_periods: usize, bc: Bc },
    /// Polynomial potentials `g`, `h`, coefficients in increasing degree.
    Potentials { g: Vec<f64>, h: Vec<f64>, ell: f64 },
    Builtin { name: Builtin },
}

/// Constant-coefficient problems on `[0, 1]` with closed-form answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `g = 9π², h = 4π²`: kernels of both operators.
    T1,
    /// `g = 2π², h = 4π²`: `L₋` kernel, `P = Q = 1`.
    T2,
    /// `g = 2π², h = π²/2`: no kernel, one real pair.
    T3,
    Free,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::T1, Builtin::T2, Builtin::T3, Builtin::Free];

    pub fn potentials(self) -> PotentialPair {
        let pi2 = std::f64::consts::PI.powi(2);
        let (g, h) = match self {
            Builtin::T1 => (9.0 * pi2, 4.0 * pi2),
            Builtin::T2 => (2.0 * pi2, 4.0 * pi2),
            Builtin::T3 => (2.0 * pi2, 0.5 * pi2),
            Builtin::Free => return PotentialPair::free(1.0),
        };
        PotentialPair::constant(g, h, 1.0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::T1 => "t1",
            Builtin::T2 => "t2",
            Builtin::T3 => "t3",
            Builtin::Free => "free",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Window {
    /// Defaults to `±(1.05 sup|g, h| + 1)`.
    pub lambda: Option<[f64; 2]>,
    pub s: [f64; 2],
}

impl Default for Window {
    fn default() -> Self {
        Self { lambda: None, s: [0.05, 1.0] }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    pub n_lambda: usize,
    pub n_s: usize,
    /// Grid intervals for the standing wave.
    pub wave_grid: usize,
    /// Interior nodes of the coarse oracle grid.
    pub fd_n: usize,
    /// Nodes per axis of the exported `det X` grid.
    pub plot_grid: usize,
    /// Random potentials tested by `check`.
    pub check_samples: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { n_lambda: 400, n_s: 400, wave_grid: 1024, fd_n: 200, plot_grid: 200, check_samples: 20 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative and absolute ODE tolerance.
    pub ode: f64,
    /// ODE tolerance of the coarse curve sweep.
    pub sweep: f64,
    /// Bisection tolerance on eigenvalues.
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ode: 1e-12, sweep: 1e-9, root: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    CurvesCsv,
    ReportJson,
    OracleCsv,
    Plotdata,
}

fn default_outputs() -> Vec<Output> {
    vec![Output::CurvesCsv, Output::ReportJson, Output::OracleCsv]
}

impl RunConfig {
    pub fn builtin(name: Builtin) -> Self {
        Self {
            problem: Problem::Builtin { name },
            window: Window::default(),
            resolution: Resolution::default(),
            tolerances: Tolerances::default(),
            outputs: default_outputs(),
            seed: 0,
        }
    }

    /// Parse by extension: `.json` is JSON, anything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        Self::parse(&src, json).map_err(|e| Error::Config(format!("{}:{e}", path.display())))
    }

    pub fn parse(src: &str, json: bool) -> std::result::Result<Self, String> {
        let cfg: Self = if json {
            serde_json::from_str(src).map_err(|e| format!("{}:{}: {e}", e.line(), e.column()))?
        } else {
            toml::from_str(src).map_err(|e| {
                let line = e.span().map_or(0, |r| src[..r.start].matches('\n').count() + 1);
                format!("{line}: {}", e.message())
            })?
        };
        cfg.validate().map_err(|(key, msg)| format!("{}: {key}: {msg}", line_of(src, key)))?;
        Ok(cfg)
    }

    /// On failure returns the offending key and a message.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let range = |key: &'static str, r: [f64; 2]| {
            if r[0] < r[1] && r.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err((key, format!("empty range {r:?}")))
            }
        };
        if let Some(l) = self.window.lambda {
            range("lambda", l)?;
        }
        range("s", self.window.s)?;
        if !(self.window.s[0] > 0.0 && self.window.s[1] <= 1.0) {
            return Err(("s", format!("must lie in (0, 1], got {:?}", self.window.s)));
        }
        let r = &self.resolution;
        for (key, v) in [
            ("n_lambda", r.n_lambda),
            ("n_s", r.n_s),
            ("wave_grid", r.wave_grid),
            ("fd_n", r.fd_n),
            ("plot_grid", r.plot_grid),
        ] {
            if v < 16 {
                return Err((key, format!("resolution must be at least 16, got {v}")));
            }
        }
        let t = &self.tolerances;
        for (key, v) in [("ode", t.ode), ("sweep", t.sweep), ("root", t.root)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err((key, format!("tolerance must be positive, got {v}")));
            }
        }
        match &self.problem {
            Problem::Wave { ell, branch, .. } => {
                if !(*ell > 0.0) {
                    return Err(("ell", format!("must be positive, got {ell}")));
                }
                if branch.range[0] > branch.range[1] {
                    return Err(("range", format!("empty range {:?}", branch.range)));
                }
            }
            Problem::Potentials { g, h, ell } => {
                if !(*ell > 0.0) {
                    return Err(("ell", format!("must be positive, got {ell}")));
                }
                if g.is_empty() || h.is_empty() {
                    return Err(("g", "potentials need at least one coefficient".into()));
                }
            }
            Problem::Elliptic { m, .. } => {
                if !(*m > 0.0 && *m < 1.0) {
                    return Err(("m", format!("must lie in (0, 1), got {m}")));
                }
            }
            Problem::Builtin { .. } => {}
        }
        Ok(())
    }

    pub fn wave_options(&self) -> WaveOptions {
        WaveOptions { grid: self.resolution.wave_grid, tol: Tolerance::new(self.tolerances.ode), ..Default::default() }
    }

    pub fn spectra_options(&self) -> SpectraOptions {
        SpectraOptions { tol: Tolerance::new(self.tolerances.ode), root_tol: self.tolerances.root, ..Default::default() }
    }

    pub fn curve_options(&self) -> CurveOptions {
        CurveOptions {
            n_lambda: self.resolution.n_lambda,
            n_s: self.resolution.n_s,
            sweep_tol: Tolerance::new(self.tolerances.sweep),
            refine_tol: Tolerance::new(self.tolerances.ode),
        }
    }

    pub fn rect(&self, p: &PotentialPair) -> Rect {
        let lam = self.window.lambda.unwrap_or_else(|| {
            let l = 1.05 * p.sup_norm() + 1.0;
            [-l, l]
        });
        Rect { lambda: lam, s: self.window.s }
    }

    /// The wave, if the problem has one, and its potentials.
    pub fn build(&self) -> Result<(Option<StandingWave>, PotentialPair)> {
        let wave = match &self.problem {
            Problem::Wave { nonlinearity, beta, ell, bc, branch } => {
                solve_standing_wave_with(nonlinearity, *beta, *ell, *bc, *branch, &self.wave_options())?
            }
            Problem::Elliptic { family, beta, m, half_periods, bc } => {
                elliptic_wave(*family, *beta, *m, *half_periods, *bc, &self.wave_options())?.0
            }
            Problem::Potentials { g, h, ell } => {
                let label = format!("polynomial g={g:?} h={h:?}");
                let p = PotentialPair::explicit(Scalar::polynomial(g.clone()), Scalar::polynomial(h.clone()), *ell, label);
                return Ok((None, p));
            }
            Problem::Builtin { name } => return Ok((None, name.potentials())),
        };
        let p = crate::waves::linearized_potentials(&wave)?;
        Ok((Some(wave), p))
    }
}

/// 1-based line of the first `key =` or `"key":` in `src`, 0 if absent.
fn line_of(src: &str, key: &str) -> usize {
    src.lines()
        .position(|l| {
            let t = l.trim_start().trim_start_matches('"');
            t.strip_prefix(key).is_some_and(|r| r.trim_start_matches('"').trim_start().starts_with(['=', ':']))
                || l.contains(&format!("{key} ="))
        })
        .map_or(0, |i| i + 1)
}
