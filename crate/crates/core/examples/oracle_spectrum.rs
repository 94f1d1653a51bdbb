//! Finite-difference spectrum with Krein values, for a constant problem and
//! for the linearization about a dnoidal wave.

use std::f64::consts::PI;

use maslov_stab::spectra::fd_spectrum;
use maslov_stab::waves::{elliptic_wave, linearized_potentials, Bc, EllipticFamily, PotentialPair, WaveOptions};

fn main() -> maslov_stab::Result<()> {
    let pi2 = PI * PI;
    let t1 = PotentialPair::constant(9.0 * pi2, 4.0 * pi2, 1.0);
    println!("g = 9π², h = 4π²; one negative Krein pair expected at ±i√24π² = ±{:.4}i", 24f64.sqrt() * pi2);
    for e in fd_spectrum(&t1, 1.0, 200)?.iter().filter(|e| e.im >= 0.0).take(6) {
        println!("  {:+.6} {:+.6}i  ±{:.1e}  krein {:?}", e.re, e.im, e.error, e.krein);
    }

    let (w, _) = elliptic_wave(EllipticFamily::Dnoidal, -2.0, 0.5, 6, Bc::Neumann, &WaveOptions::default())?;
    let p = linearized_potentials(&w)?;
    println!("dnoidal wave over three periods:");
    for e in fd_spectrum(&p, 1.0, 200)?.iter().filter(|e| e.im >= 0.0 && e.re >= 0.0).take(6) {
        println!("  {:+.6} {:+.6}i  ±{:.1e}  krein {:?}", e.re, e.im, e.error, e.krein);
    }
    Ok(())
}
