//! Uniform sample grids on `[0, ell]`, quadrature and interpolation.

use serde::{Deserialize, Serialize};

/// Values and first derivatives of a function on the uniform grid
/// `x_i = i * ell / n`, `i = 0..=n`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridFn {
    pub ell: f64,
    pub val: Vec<f64>,
    pub der: Vec<f64>,
}

impl GridFn {
    pub fn new(ell: f64, val: Vec<f64>, der: Vec<f64>) -> Self {
        assert_eq!(val.len(), der.len());
        assert!(val.len() >= 2);
        Self { ell, val, der }
    }

    pub fn zeros(ell: f64, n: usize) -> Self {
        Self::new(ell, vec![0.0; n + 1], vec![0.0; n + 1])
    }

    /// Sample a function and its derivative.
    pub fn from_fn(ell: f64, n: usize, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (val, der) = nodes(ell, n).map(f).unzip();
        Self::new(ell, val, der)
    }

    pub fn intervals(&self) -> usize {
        self.val.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.ell / self.intervals() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn last(&self) -> (f64, f64) {
        (*self.val.last().unwrap(), *self.der.last().unwrap())
    }

    pub fn scale(&mut self, c: f64) {
        self.val.iter_mut().for_each(|v| *v *= c);
        self.der.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GridFn) -> Self {
        let val = self.val.iter().zip(&other.val).map(|(a, b)| a + c * b).collect();
        let der = self.der.iter().zip(&other.der).map(|(a, b)| a + c * b).collect();
        Self::new(self.ell, val, der)
    }

    pub fn sup_norm(&self) -> f64 {
        self.val.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &GridFn) -> f64 {
        let prod: Vec<f64> = self.val.iter().zip(&other.val).map(|(a, b)| a * b).collect();
        simpson(&prod, self.step())
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Cubic Hermite interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.step();
        let n = self.intervals();
        let i = ((x / h).floor().max(0.0) as usize).min(n - 1);
        let t = (x - i as f64 * h) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.val[i]
            + (t3 - 2.0 * t2 + t) * h * self.der[i]
            + (-2.0 * t3 + 3.0 * t2) * self.val[i + 1]
            + (t3 - t2) * h * self.der[i + 1]
    }
}

pub fn nodes(ell: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = ell / n as f64;
    (0..=n).map(move |i| if i == n { ell } else { i as f64 * h })
}

/// Composite Simpson rule on equally spaced samples. An odd number of
/// intervals finishes with the 3/8 rule on the last three.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    match n {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        2 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        3 => 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]),
        _ if n.is_multiple_of(2) => {
            let mut s = f[0] + f[n];
            for (i, v) in f.iter().enumerate().take(n).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            s * h / 3.0
        }
        _ => simpson(&f[..n - 2], h) + simpson(&f[n - 3..], h),
    }
}

/// Running integral `F(x_i) = ∫_0^{x_i} f` from values and derivatives,
/// using the end-corrected trapezoid rule (fourth order).
pub fn cumulative_integral(f: &[f64], df: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..f.len() - 1 {
        acc += 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
        out.push(acc);
    }
    out
}

/// Finite-difference weights for the `m`-th derivative at `x0` on arbitrary
/// nodes (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Derivative of sampled data at every node with a `width`-point stencil,
/// centred where possible and one-sided near the ends.
pub fn differentiate(f: &[f64], h: f64, width: usize) -> Vec<f64> {
    let n = f.len();
    let w = width.min(n);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(w / 2).min(n - w);
            let xs: Vec<f64> = (start..start + w).map(|j| (j as f64 - i as f64) * h).collect();
            let wts = fd_weights(0.0, &xs, 1);
            wts.iter().zip(&f[start..start + w]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Quintic Hermite interpolant on a uniform grid from values, first and
/// second derivatives. Evaluates the function and its first derivative.
#[derive(Debug, Clone)]
pub struct QuinticHermite {
    pub h: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    pub d2y: Vec<f64>,
}

impl QuinticHermite {
    pub fn reach(&self) -> f64 {
        self.h * (self.y.len() - 1) as f64
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.y.len() - 1;
        let h = self.h;
        let i = ((x / h).floor().max(0.0) as usize).min(n - 1);
        let t = (x - i as f64 * h) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 0.5 * t3 - t4 + 0.5 * t5;
        let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
        let d3 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let d5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
        let (a, b) = (i, i + 1);
        let v = h0 * self.y[a]
            + h * h1 * self.dy[a]
            + h * h * h2 * self.d2y[a]
            + h3 * self.y[b]
            + h * h4 * self.dy[b]
            + h * h * h5 * self.d2y[b];
        let dv = (d0 * self.y[a] + d3 * self.y[b]) / h
            + d1 * self.dy[a]
            + d4 * self.dy[b]
            + h * (d2 * self.d2y[a] + d5 * self.d2y[b]);
        (v, dv)
    }
}
