//! Solve a few standing waves and report how well they satisfy their equation.

use maslov_stab::waves::{
    elliptic_wave, linearized_potentials, solve_standing_wave, Bc, Branch, EllipticFamily, Nonlinearity, WaveOptions,
};

fn main() -> maslov_stab::Result<()> {
    let septic = Nonlinearity::Power { p: 3.0 };
    let branch = Branch { range: [0.5, 4.0], interior_critical_points: 1 };
    let opts = WaveOptions::default();
    let waves = [
        ("septic, ell = 2.12743", solve_standing_wave(&septic, -2.0, 2.12743, Bc::Dirichlet, branch)?),
        ("dnoidal, three periods", elliptic_wave(EllipticFamily::Dnoidal, -2.0, 0.5, 6, Bc::Neumann, &opts)?.0),
        ("cnoidal, 3/2 periods", elliptic_wave(EllipticFamily::Cnoidal, -2.0, 0.8, 3, Bc::Dirichlet, &opts)?.0),
    ];
    println!("{:<24} {:>8} {:>10} {:>10} {:>10} {:>10}", "wave", "ell", "amplitude", "residual", "H drift", "sup|g|");
    for (name, w) in &waves {
        let p = linearized_potentials(w)?;
        println!(
            "{name:<24} {:>8.5} {:>10.6} {:>10.2e} {:>10.2e} {:>10.4}",
            w.ell,
            w.amplitude(),
            w.equation_residual(),
            w.hamiltonian_drift(),
            p.g.sup_norm_on(p.ell)
        );
        if let Some(d) = w.closed_form_discrepancy {
            println!("{:<24} closed-form discrepancy {d:.2e}", "");
        }
    }
    Ok(())
}
