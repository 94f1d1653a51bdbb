//! Crossing forms at conjugate points and at a real eigenvalue, and the
//! Hadamard slope of the curve through the eigenvalue.

use std::f64::consts::PI;

use maslov_stab::maslov::{crossing_form_lambda, crossing_form_s, hadamard_slope, second_order_form};
use maslov_stab::spectra::{crossing_at, real_eigenvalues, SpectraOptions};
use maslov_stab::waves::PotentialPair;

fn main() -> maslov_stab::Result<()> {
    let pi2 = PI * PI;
    let opts = SpectraOptions::default();

    let t1 = PotentialPair::constant(9.0 * pi2, 4.0 * pi2, 1.0);
    let c = crossing_at(&t1, 0.0, 1.0, &opts)?;
    let ms = crossing_form_s(&c, &t1)?;
    let m2 = second_order_form(&c, &t1)?;
    println!("g = 9π², h = 4π² at (0, 1): kernel {:?}", c.which_kernel);
    println!("  s-form     {:?}  (expected diag(-18π², 8π²) = {:.4}, {:.4})", ms.entries, -18.0 * pi2, 8.0 * pi2);
    println!("  2nd order  {:?}  (expected 2/(5π²) = {:.6})", m2.form.entries, 2.0 / (5.0 * pi2));

    let t3 = PotentialPair::constant(2.0 * pi2, 0.5 * pi2, 1.0);
    for x in real_eigenvalues(&t3, 1.0, [1e-3, 30.0], &opts)? {
        let ml = crossing_form_lambda(&x)?;
        println!("g = 2π², h = π²/2: λ = {:.10} (closed form {:.10})", x.lambda0, pi2 / 2f64.sqrt());
        println!("  λ-form {:.10} (expected 2√2/3 = {:.10})", ml.entries[0], 2.0 * 2f64.sqrt() / 3.0);
        println!("  ds/dλ  {:.6e}", hadamard_slope(&x, &t3)?);
    }
    Ok(())
}
