//! The rescaled eigenvalue problem as a first-order system in `(u, v, r, z)`
//! with `r = u'/s`, `z = -v'/s`:
//!
//! ```text
//! u' =  s r            r' = -s g(sx) u - sλ v
//! v' = -s z            z' = -sλ u + s h(sx) v
//! ```
//!
//! The fundamental matrix `Φ = [[U, X], [V, Y]]` starts at the identity; `X`
//! carries the response of `(u, v)` to the initial slopes, so `det X(ℓ)`
//! vanishes exactly at Dirichlet eigenvalues.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{self, GridFn};
use crate::ode::{self, Tolerance};
use crate::waves::PotentialPair;

#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub lambda: f64,
    pub s: f64,
    pub u: Matrix2<f64>,
    pub v: Matrix2<f64>,
    pub x: Matrix2<f64>,
    pub y: Matrix2<f64>,
}

impl BoundaryFrame {
    pub fn full(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.u);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.x);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.v);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.y);
        m
    }

    fn from_full(lambda: f64, s: f64, m: &Matrix4<f64>) -> Self {
        Self {
            lambda,
            s,
            u: m.fixed_view::<2, 2>(0, 0).into_owned(),
            x: m.fixed_view::<2, 2>(0, 2).into_owned(),
            v: m.fixed_view::<2, 2>(2, 0).into_owned(),
            y: m.fixed_view::<2, 2>(2, 2).into_owned(),
        }
    }

    /// The four columns of the trace of the solution space.
    pub fn trace_columns(&self) -> [TraceVector; 4] {
        let phi = self.full();
        std::array::from_fn(|j| {
            let mut t = [0.0; 8];
            // Identity data at 0: values e_j, and (-u'(0)/s, v'(0)/s) = -(r, z)(0).
            if j < 2 {
                t[j] = 1.0;
            } else {
                t[2 + j] = -1.0;
            }
            t[2] = phi[(0, j)];
            t[3] = phi[(1, j)];
            t[6] = phi[(2, j)];
            t[7] = phi[(3, j)];
            TraceVector(t)
        })
    }

    /// `ω(colᵢ, colⱼ)` over the trace columns; zero for a Lagrangian plane.
    pub fn lagrangian_gram(&self) -> Matrix4<f64> {
        let cols = self.trace_columns();
        Matrix4::from_fn(|i, j| omega(&cols[i], &cols[j]))
    }
}

fn check_rescaling(p: &PotentialPair, lambda: f64, s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("need s > 0 and finite lambda, got lambda={lambda}, s={s}")));
    }
    if s * p.ell > p.reach * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "rescaling s={s} needs potentials on [0, {}] but they reach only {}",
            s * p.ell,
            p.reach
        )));
    }
    Ok(())
}

#[inline]
fn apply<const C: usize>(s: f64, lambda: f64, g: f64, h: f64, y: &[f64], dy: &mut [f64]) {
    for c in 0..C {
        let (u, v, r, z) = (y[4 * c], y[4 * c + 1], y[4 * c + 2], y[4 * c + 3]);
        dy[4 * c] = s * r;
        dy[4 * c + 1] = -s * z;
        dy[4 * c + 2] = -s * (g * u + lambda * v);
        dy[4 * c + 3] = s * (h * v - lambda * u);
    }
}

fn integration_error(lambda: f64, s: f64) -> impl Fn(ode::OdeError) -> Error {
    move |e| Error::Integration { lambda, s, reason: format!("{} at x={}", e.reason, e.x) }
}

/// Flow of the system from `a` to `b` applied to `init`.
pub fn propagate(
    p: &PotentialPair,
    lambda: f64,
    s: f64,
    a: f64,
    b: f64,
    init: &Matrix4<f64>,
    tol: Tolerance,
) -> Result<Matrix4<f64>> {
    check_rescaling(p, lambda, s)?;
    let mut y0 = [0.0; 16];
    for c in 0..4 {
        for r in 0..4 {
            y0[4 * c + r] = init[(r, c)];
        }
    }
    let y = ode::integrate_to(
        |x, y: &[f64; 16], dy: &mut [f64; 16]| {
            apply::<4>(s, lambda, p.g.value(s * x), p.h.value(s * x), y, dy)
        },
        a,
        y0,
        b,
        tol,
    )
    .map_err(integration_error(lambda, s))?;
    Ok(Matrix4::from_fn(|r, c| y[4 * c + r]))
}

pub fn fundamental_matrix(p: &PotentialPair, lambda: f64, s: f64) -> Result<BoundaryFrame> {
    fundamental_matrix_with(p, lambda, s, Tolerance::default())
}

pub fn fundamental_matrix_with(p: &PotentialPair, lambda: f64, s: f64, tol: Tolerance) -> Result<BoundaryFrame> {
    let m = propagate(p, lambda, s, 0.0, p.ell, &Matrix4::identity(), tol)?;
    Ok(BoundaryFrame::from_full(lambda, s, &m))
}

/// Only the slope-initialized columns: `(X(ℓ), Y(ℓ))`.
pub fn slope_columns(p: &PotentialPair, lambda: f64, s: f64, tol: Tolerance) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    check_rescaling(p, lambda, s)?;
    let mut y0 = [0.0; 8];
    y0[2] = 1.0;
    y0[7] = 1.0;
    let y = ode::integrate_to(
        |x, y: &[f64; 8], dy: &mut [f64; 8]| apply::<2>(s, lambda, p.g.value(s * x), p.h.value(s * x), y, dy),
        0.0,
        y0,
        p.ell,
        tol,
    )
    .map_err(integration_error(lambda, s))?;
    let x = Matrix2::new(y[0], y[4], y[1], y[5]);
    let yb = Matrix2::new(y[2], y[6], y[3], y[7]);
    Ok((x, yb))
}

/// A solution `(u, v)` of the rescaled eigenvalue equation sampled on the
/// uniform grid, with derivatives taken from the ODE state.
#[derive(Debug, Clone)]
pub struct SampledPair {
    pub u: GridFn,
    pub v: GridFn,
}

impl SampledPair {
    /// `∫ u² + v²`.
    pub fn norm_sq(&self) -> f64 {
        self.u.dot(&self.u) + self.v.dot(&self.v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { u: self.u.scaled(c), v: self.v.scaled(c) }
    }

    pub fn normalized(&self) -> (Self, f64) {
        let n = self.norm_sq().sqrt();
        (self.scaled(1.0 / n), n)
    }
}

/// Integrate from initial state `(u, v, r, z)(0)` and sample on `n` intervals.
pub fn solve_sampled(
    p: &PotentialPair,
    lambda: f64,
    s: f64,
    init: [f64; 4],
    n: usize,
    tol: Tolerance,
) -> Result<SampledPair> {
    check_rescaling(p, lambda, s)?;
    let xs: Vec<f64> = grid::nodes(p.ell, n).skip(1).collect();
    let states = ode::integrate_samples(
        |x, y: &[f64; 4], dy: &mut [f64; 4]| apply::<1>(s, lambda, p.g.value(s * x), p.h.value(s * x), y, dy),
        0.0,
        init,
        &xs,
        tol,
    )
    .map_err(integration_error(lambda, s))?;
    let mut uv = vec![init[0]];
    let mut ud = vec![s * init[2]];
    let mut vv = vec![init[1]];
    let mut vd = vec![-s * init[3]];
    for y in &states {
        uv.push(y[0]);
        ud.push(s * y[2]);
        vv.push(y[1]);
        vd.push(-s * y[3]);
    }
    Ok(SampledPair { u: GridFn::new(p.ell, uv, ud), v: GridFn::new(p.ell, vv, vd) })
}

/// Values and slopes of `(u, v)` at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointData {
    pub u0: f64,
    pub v0: f64,
    pub du0: f64,
    pub dv0: f64,
    pub ul: f64,
    pub vl: f64,
    pub dul: f64,
    pub dvl: f64,
}

impl EndpointData {
    pub fn of(pair: &SampledPair) -> Self {
        let (ul, dul) = pair.u.last();
        let (vl, dvl) = pair.v.last();
        Self { u0: pair.u.val[0], v0: pair.v.val[0], du0: pair.u.der[0], dv0: pair.v.der[0], ul, vl, dul, dvl }
    }
}

/// Element of `ℝ⁸` ordered `(u(0), v(0), u(ℓ), v(ℓ), -u'(0)/s, v'(0)/s, u'(ℓ)/s, -v'(ℓ)/s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceVector(pub [f64; 8]);

pub fn rescaled_trace(e: &EndpointData, s: f64) -> TraceVector {
    TraceVector([e.u0, e.v0, e.ul, e.vl, -e.du0 / s, e.dv0 / s, e.dul / s, -e.dvl / s])
}

impl TraceVector {
    /// Membership in the Dirichlet subspace `{0} × ℝ⁴`.
    pub fn is_dirichlet(&self, tol: f64) -> bool {
        self.0[..4].iter().all(|v| v.abs() <= tol)
    }
}

/// The canonical `J = [[0, -I₄], [I₄, 0]]`.
pub fn symplectic_j() -> SMatrix<f64, 8, 8> {
    SMatrix::from_fn(|i, j| {
        if i < 4 && j == i + 4 {
            -1.0
        } else if i >= 4 && j + 4 == i {
            1.0
        } else {
            0.0
        }
    })
}

/// `ω(x, y) = Jx · y`.
pub fn omega(x: &TraceVector, y: &TraceVector) -> f64 {
    (0..4).map(|i| -x.0[i + 4] * y.0[i] + x.0[i] * y.0[i + 4]).sum()
}

/// A pair `(u, v)` with two derivatives on the uniform grid of `[0, ℓ]`.
#[derive(Debug, Clone)]
pub struct H2Pair {
    pub ell: f64,
    /// `[u, u', u'']`
    pub u: [Vec<f64>; 3],
    /// `[v, v', v'']`
    pub v: [Vec<f64>; 3],
}

impl H2Pair {
    pub fn from_fn(ell: f64, n: usize, f: impl Fn(f64) -> ([f64; 3], [f64; 3])) -> Self {
        let mut u: [Vec<f64>; 3] = Default::default();
        let mut v: [Vec<f64>; 3] = Default::default();
        for x in grid::nodes(ell, n) {
            let (a, b) = f(x);
            for k in 0..3 {
                u[k].push(a[k]);
                v[k].push(b[k]);
            }
        }
        Self { ell, u, v }
    }

    fn endpoints(&self) -> EndpointData {
        let n = self.u[0].len() - 1;
        EndpointData {
            u0: self.u[0][0],
            v0: self.v[0][0],
            du0: self.u[1][0],
            dv0: self.v[1][0],
            ul: self.u[0][n],
            vl: self.v[0][n],
            dul: self.u[1][n],
            dvl: self.v[1][n],
        }
    }

    /// `S(N_s - s²λ)` applied pointwise: `(L₊u - s²λv, -L₋v - s²λu)`.
    fn s_operator(&self, p: &PotentialPair, lambda: f64, s: f64) -> (Vec<f64>, Vec<f64>) {
        let h = self.ell / (self.u[0].len() - 1) as f64;
        let mu = s * s * lambda;
        let mut a = Vec::with_capacity(self.u[0].len());
        let mut b = Vec::with_capacity(self.u[0].len());
        for i in 0..self.u[0].len() {
            let x = i as f64 * h;
            let g = s * s * p.g.value(s * x);
            let hh = s * s * p.h.value(s * x);
            let (u, v) = (self.u[0][i], self.v[0][i]);
            a.push(-self.u[2][i] - g * u - mu * v);
            b.push(self.v[2][i] + hh * v - mu * u);
        }
        (a, b)
    }
}

/// `|⟨S(N_s - s²λ)u, w⟩ - ⟨u, S(N_s - s²λ)w⟩ - s ω(Tr_s u, Tr_s w)|`.
pub fn greens_residual(u: &H2Pair, w: &H2Pair, p: &PotentialPair, lambda: f64, s: f64) -> f64 {
    let n = u.u[0].len() - 1;
    let h = u.ell / n as f64;
    let (au, bu) = u.s_operator(p, lambda, s);
    let (aw, bw) = w.s_operator(p, lambda, s);
    let lhs1: Vec<f64> = (0..=n).map(|i| au[i] * w.u[0][i] + bu[i] * w.v[0][i]).collect();
    let lhs2: Vec<f64> = (0..=n).map(|i| u.u[0][i] * aw[i] + u.v[0][i] * bw[i]).collect();
    let lhs = grid::simpson(&lhs1, h) - grid::simpson(&lhs2, h);
    let rhs = s * omega(&rescaled_trace(&u.endpoints(), s), &rescaled_trace(&w.endpoints(), s));
    (lhs - rhs).abs()
}
