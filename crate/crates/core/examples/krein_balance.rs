//! Krein counts from the oracle spectrum against the Maslov corner term.

use std::f64::consts::PI;

use maslov_stab::stability::krein_analysis;
use maslov_stab::waves::PotentialPair;

fn main() -> maslov_stab::Result<()> {
    let pi2 = PI * PI;
    for (g, h) in [(9.0, 4.0), (2.0, 4.0), (2.0, 0.5)] {
        let r = krein_analysis(&PotentialPair::constant(g * pi2, h * pi2, 1.0))?;
        let k = &r.kks_balance;
        println!("g = {g}π², h = {h}π²  P = {}, Q = {}", r.p, r.q);
        println!("  D+ = {:?}  D- = {:?}", r.d_plus.entries, r.d_minus.entries);
        println!("  c = {:?}, n-(D+) - n-(D-) = {}", r.corner_c, r.n_minus_dplus as i32 - r.n_minus_dminus as i32);
        println!(
            "  k_r + 2k_c + 2k_i- = {} + 2·{} + 2·{} vs {}  balance {}",
            k.k_r, k.k_c, k.k_i_minus, k.rhs, k.balance
        );
    }
    Ok(())
}
