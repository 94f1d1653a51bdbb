//! Zero set of `det X(ℓ; λ, s)` over a rectangle, by marching squares on a
//! coarse sweep followed by root refinement on every crossed edge.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::char_det_with;
use crate::error::{Error, Result};
use crate::ode::Tolerance;
use crate::waves::PotentialPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lambda: [f64; 2],
    pub s: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
pub struct CurveOptions {
    pub n_lambda: usize,
    pub n_s: usize,
    /// Tolerance for the coarse sweep; only signs are used from it.
    pub sweep_tol: Tolerance,
    /// Tolerance for refining crossing points on cell edges.
    pub refine_tol: Tolerance,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { n_lambda: 400, n_s: 400, sweep_tol: Tolerance::new(1e-9), refine_tol: Tolerance::default() }
    }
}

/// One connected branch of the zero set, as a polyline of `(λ, s)` points.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueCurve {
    /// Position in the output list, stable for a fixed rectangle and grid.
    pub branch_id: usize,
    pub points: Vec<[f64; 2]>,
    /// Indices of points where `s` turns around along the curve, i.e. where
    /// `∂λ det X` vanishes and the branch touches a horizontal line.
    pub tangency_flags: Vec<usize>,
    pub closed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Edge {
    /// From node (i, j) to (i + 1, j).
    H(usize, usize),
    /// From node (i, j) to (i, j + 1).
    V(usize, usize),
}

pub fn trace_curves(p: &PotentialPair, rect: Rect, opts: &CurveOptions) -> Result<Vec<EigenvalueCurve>> {
    let (nl, ns) = (opts.n_lambda.max(2), opts.n_s.max(2));
    let [l0, l1] = rect.lambda;
    let [s0, s1] = rect.s;
    if !(l0 < l1 && 0.0 < s0 && s0 < s1) {
        return Err(Error::InvalidInput(format!("bad rectangle {rect:?}")));
    }
    let lam = |i: usize| l0 + (l1 - l0) * i as f64 / nl as f64;
    let ess = |j: usize| s0 + (s1 - s0) * j as f64 / ns as f64;

    let rows: Vec<Vec<f64>> = (0..=ns)
        .into_par_iter()
        .map(|j| (0..=nl).map(|i| char_det_with(p, lam(i), ess(j), opts.sweep_tol)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let pos = |i: usize, j: usize| rows[j][i] >= 0.0;

    let crossed = |e: Edge| match e {
        Edge::H(i, j) => pos(i, j) != pos(i + 1, j),
        Edge::V(i, j) => pos(i, j) != pos(i, j + 1),
    };

    let mut links: HashMap<Edge, Vec<Edge>> = HashMap::new();
    let mut link = |a: Edge, b: Edge| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    let mut saddles = Vec::new();
    for j in 0..ns {
        for i in 0..nl {
            let e = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let hit: Vec<Edge> = e.iter().copied().filter(|&x| crossed(x)).collect();
            match hit.len() {
                2 => link(hit[0], hit[1]),
                4 => saddles.push((i, j)),
                _ => {}
            }
        }
    }
    let centres: Vec<f64> = saddles
        .par_iter()
        .map(|&(i, j)| char_det_with(p, 0.5 * (lam(i) + lam(i + 1)), 0.5 * (ess(j) + ess(j + 1)), opts.sweep_tol))
        .collect::<Result<_>>()?;
    for (&(i, j), &c) in saddles.iter().zip(&centres) {
        let e = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
        if (c >= 0.0) == pos(i, j) {
            // The centre joins corners (i, j) and (i+1, j+1): cut off the other two.
            link(e[0], e[1]);
            link(e[2], e[3]);
        } else {
            link(e[0], e[3]);
            link(e[1], e[2]);
        }
    }

    // Chain edges into polylines, open ones first.
    let mut edges: Vec<Edge> = links.keys().copied().collect();
    edges.sort_by_key(|e| match *e {
        Edge::H(i, j) => (j, i, 0),
        Edge::V(i, j) => (j, i, 1),
    });
    let mut seen: HashMap<Edge, bool> = HashMap::new();
    let mut chains: Vec<(Vec<Edge>, bool)> = Vec::new();
    for pass in 0..2 {
        for &start in &edges {
            if seen.contains_key(&start) || (pass == 0 && links[&start].len() != 1) {
                continue;
            }
            let mut chain = vec![start];
            seen.insert(start, true);
            let mut cur = start;
            let closed = loop {
                let next = links[&cur].iter().copied().find(|e| !seen.contains_key(e));
                match next {
                    Some(n) => {
                        seen.insert(n, true);
                        chain.push(n);
                        cur = n;
                    }
                    None => break chain.len() > 2 && links[&cur].contains(&start),
                }
            };
            chains.push((chain, closed));
        }
    }

    let refine = |e: Edge| -> Result<[f64; 2]> {
        match e {
            Edge::H(i, j) => {
                let s = ess(j);
                let x = root_on_segment(|l| char_det_with(p, l, s, opts.refine_tol), lam(i), lam(i + 1))?;
                Ok([x, s])
            }
            Edge::V(i, j) => {
                let l = lam(i);
                let x = root_on_segment(|s| char_det_with(p, l, s, opts.refine_tol), ess(j), ess(j + 1))?;
                Ok([l, x])
            }
        }
    };
    chains
        .into_par_iter()
        .enumerate()
        .map(|(branch_id, (chain, closed))| {
            let points: Vec<[f64; 2]> = chain.iter().map(|&e| refine(e)).collect::<Result<_>>()?;
            let tangency_flags = (1..points.len().saturating_sub(1))
                .filter(|&k| (points[k][1] - points[k - 1][1]) * (points[k + 1][1] - points[k][1]) < 0.0)
                .collect();
            Ok(EigenvalueCurve { branch_id, points, tangency_flags, closed })
        })
        .collect()
}

/// `(λ, s, det X)` on an `(n_lambda + 1) × (n_s + 1)` grid over `rect`,
/// row by row in `s`.
pub fn det_grid(p: &PotentialPair, rect: Rect, n_lambda: usize, n_s: usize, tol: Tolerance) -> Result<Vec<[f64; 3]>> {
    let [l0, l1] = rect.lambda;
    let [s0, s1] = rect.s;
    let rows: Vec<Vec<[f64; 3]>> = (0..=n_s)
        .into_par_iter()
        .map(|j| {
            let s = s0 + (s1 - s0) * j as f64 / n_s as f64;
            (0..=n_lambda)
                .map(|i| {
                    let l = l0 + (l1 - l0) * i as f64 / n_lambda as f64;
                    Ok([l, s, char_det_with(p, l, s, tol)?])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// Root of a function with a sign change on `[a, b]` (Illinois variant of
/// regula falsi), polished to round-off.
pub(crate) fn root_on_segment(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        // The sweep saw a sign change at lower accuracy; fall back to the midpoint.
        return Ok(0.5 * (a + b));
    }
    let width = b - a;
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c.is_finite() && c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) + 1e-15 * width {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Follow a branch `s(λ)` through the given `λ` values: the zero of
/// `s ↦ det X(ℓ; λ, s)` inside `bracket`, or `None` without a sign change.
pub fn trace_branch(p: &PotentialPair, lambdas: &[f64], bracket: [f64; 2], tol: Tolerance) -> Result<Vec<Option<f64>>> {
    lambdas
        .par_iter()
        .map(|&l| {
            let f = |s: f64| char_det_with(p, l, s, tol);
            let (fa, fb) = (f(bracket[0])?, f(bracket[1])?);
            if (fa < 0.0) == (fb < 0.0) && fa != 0.0 && fb != 0.0 {
                return Ok(None);
            }
            root_on_segment(f, bracket[0], bracket[1]).map(Some)
        })
        .collect()
}
