//! Trace the real eigenvalue curves of a constant-coefficient problem and
//! compare them with the closed form `λ² = (g - k²π²s²)(k²π²s² - h)/s⁴`.

use std::f64::consts::PI;

use maslov_stab::spectra::{trace_curves, CurveOptions, Rect};
use maslov_stab::waves::PotentialPair;

fn main() -> maslov_stab::Result<()> {
    let (g, h) = (2.0 * PI * PI, 0.5 * PI * PI);
    let p = PotentialPair::constant(g, h, 1.0);
    let rect = Rect { lambda: [-8.0, 8.0], s: [0.3, 1.0] };
    let curves = trace_curves(&p, rect, &CurveOptions { n_lambda: 160, n_s: 160, ..Default::default() })?;
    for c in &curves {
        let worst = c
            .points
            .iter()
            .map(|&[l, s]| {
                let k2 = PI * PI * s * s;
                (l * l - (g - k2) * (k2 - h) / s.powi(4)).abs() / (1.0 + l * l)
            })
            .fold(0.0, f64::max);
        println!(
            "branch {}: {} points, closed={}, tangencies at {:?}, worst relative mismatch {worst:.1e}",
            c.branch_id,
            c.points.len(),
            c.closed,
            c.tangency_flags.iter().map(|&k| c.points[k]).collect::<Vec<_>>()
        );
    }
    Ok(())
}
