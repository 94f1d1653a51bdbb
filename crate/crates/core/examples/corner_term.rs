//! The corner term and the Maslov box counts for the built-in problems.

use std::f64::consts::PI;

use maslov_stab::maslov::maslov_box;
use maslov_stab::waves::PotentialPair;

fn main() -> maslov_stab::Result<()> {
    let pi2 = PI * PI;
    let cases = [
        ("g=9π² h=4π² (double kernel)", 9.0, 4.0),
        ("g=2π² h=4π² (L- kernel)", 2.0, 4.0),
        ("g=2π² h=π²/2 (no kernel)", 2.0, 0.5),
        ("g=h=4π² (isolated)", 4.0, 4.0),
    ];
    println!("{:<30} {:>3} {:>3} {:>4} {:>7} {:>6} {:>8}", "problem", "P", "Q", "c", "gamma3", "bound", "recount");
    for (name, g, h) in cases {
        let b = maslov_box(&PotentialPair::constant(g * pi2, h * pi2, 1.0))?;
        println!(
            "{name:<30} {:>3} {:>3} {:>4} {:>7} {:>6} {:>8?}",
            b.p, b.q, b.corner_c, b.gamma3_index, b.lower_bound, b.gamma3_recount
        );
        if let Some(c) = &b.concavity {
            println!("{:<30} s'' = {:?}, leaves towards {:?}", "", c.sddot, c.s_sharp);
        }
    }
    Ok(())
}
