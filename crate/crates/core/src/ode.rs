//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.
//!
//! The stepper always lands exactly on the requested output abscissae, so
//! sampled solutions never need interpolation.

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 2_000_000 }
    }
}

impl Tolerance {
    pub fn new(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct OdeError {
    pub x: f64,
    pub reason: &'static str,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(x, y)` from `x0` through every point of `stops`
/// (monotone, in the direction of integration), calling `out(i, y)` on
/// arrival at `stops[i]`. Returns the state at the last stop.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    stops: &[f64],
    tol: Tolerance,
    mut out: O,
) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
    O: FnMut(usize, &[f64; N]),
{
    let Some(&last) = stops.last() else {
        return Ok(y0);
    };
    let dir = if last >= x0 { 1.0 } else { -1.0 };
    let span = (last - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    f(x, &y, &mut k1);

    let mut h = initial_step(&y, &k1, span, tol);
    let mut steps = 0usize;
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];
    let mut yt = [0.0; N];
    let mut ynew = [0.0; N];

    for (i, &target) in stops.iter().enumerate() {
        while dir * (target - x) > 0.0 {
            steps += 1;
            if steps > tol.max_steps {
                return Err(OdeError { x, reason: "step budget exhausted" });
            }
            let remaining = (target - x).abs();
            let mut last_step = false;
            if h >= remaining {
                h = remaining;
                last_step = true;
            }
            let hs = dir * h;

            for j in 0..N {
                yt[j] = y[j] + hs * A21 * k1[j];
            }
            f(x + C2 * hs, &yt, &mut k2);
            for j in 0..N {
                yt[j] = y[j] + hs * (A31 * k1[j] + A32 * k2[j]);
            }
            f(x + C3 * hs, &yt, &mut k3);
            for j in 0..N {
                yt[j] = y[j] + hs * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j]);
            }
            f(x + C4 * hs, &yt, &mut k4);
            for j in 0..N {
                yt[j] = y[j] + hs * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j]);
            }
            f(x + C5 * hs, &yt, &mut k5);
            for j in 0..N {
                yt[j] = y[j]
                    + hs * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j] + A64 * k4[j] + A65 * k5[j]);
            }
            f(x + hs, &yt, &mut k6);
            for j in 0..N {
                ynew[j] = y[j]
                    + hs * (A71 * k1[j] + A73 * k3[j] + A74 * k4[j] + A75 * k5[j] + A76 * k6[j]);
            }
            let xnew = if last_step { target } else { x + hs };
            f(xnew, &ynew, &mut k7);

            let mut err = 0.0;
            for j in 0..N {
                let e = hs
                    * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);
                let sc = tol.atol + tol.rtol * y[j].abs().max(ynew[j].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                return Err(OdeError { x, reason: "non-finite state" });
            }

            if err <= 1.0 {
                x = xnew;
                y = ynew;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A step shortened to hit a stop says nothing about the natural step size.
                if !last_step {
                    h *= fac;
                }
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-15 * x.abs().max(span) {
                    return Err(OdeError { x, reason: "step size underflow" });
                }
            }
        }
        out(i, &y);
    }
    Ok(y)
}

/// Integrate to a single endpoint.
pub fn integrate_to<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    tol: Tolerance,
) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    integrate(f, x0, y0, &[x1], tol, |_, _| {})
}

/// Integrate and return the state at every stop.
pub fn integrate_samples<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    stops: &[f64],
    tol: Tolerance,
) -> Result<Vec<[f64; N]>, OdeError>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    let mut states = Vec::with_capacity(stops.len());
    integrate(f, x0, y0, stops, tol, |_, y| states.push(*y))?;
    Ok(states)
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], span: f64, tol: Tolerance) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for j in 0..N {
        let sc = tol.atol + tol.rtol * y[j].abs();
        d0 += (y[j] / sc).powi(2);
        d1 += (dy[j] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-12 * span, 0.1 * span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_hits_every_stop() {
        let stops: Vec<f64> = (1..=50).map(|i| i as f64 * 0.2).collect();
        let states = integrate_samples(
            |_, y: &[f64; 2], dy: &mut [f64; 2]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            [0.0, 1.0],
            &stops,
            Tolerance::default(),
        )
        .unwrap();
        for (x, y) in stops.iter().zip(&states) {
            assert!((y[0] - x.sin()).abs() < 1e-10, "x={x}");
            assert!((y[1] - x.cos()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn backward_integration() {
        let y = integrate_to(|_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0], 1.0, [1.0], 0.0, Tolerance::default())
            .unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-12);
    }
}
