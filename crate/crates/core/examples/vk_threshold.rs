//! Locate the length at which the positive septic Dirichlet wave loses
//! stability, and check the classical mass-derivative criterion against it.

use maslov_stab::stability::{classical_vk, corner_concavity, stability_report, vk_threshold, VkFamily};
use maslov_stab::waves::{solve_standing_wave, Bc, Branch, Nonlinearity};

fn main() -> maslov_stab::Result<()> {
    let f = Nonlinearity::Power { p: 3.0 };
    let wave = |ell: f64| solve_standing_wave(&f, -2.0, ell, Bc::Dirichlet, Branch { range: [0.5, 4.0], interior_critical_points: 1 });
    let star = vk_threshold(|l| wave(l), 2.12743, 2.776, 1e-6)?;
    println!("threshold length {star:.6}");
    for ell in [2.12743, 2.4, 2.7, 2.776] {
        let w = wave(ell)?;
        let vk = classical_vk(&w, VkFamily::Dirichlet)?;
        let r = stability_report(&w)?;
        println!(
            "ell = {ell:<8} s'' = {:+.4e}  mass derivative/2 = {:+.4e}  direct = {:+.4e}  {:?}",
            corner_concavity(&w)?,
            vk.value,
            vk.direct,
            r.verdict
        );
    }
    Ok(())
}
