//! Tabulates the settling velocity, the compression coefficient `d(X)` and
//! its primitive `D(X)` for the default sludge.

use sbr_settling::constitutive::{Constitutive, SettlingParams};

fn main() -> sbr_settling::Result<()> {
    let p = SettlingParams::default();
    let cons = Constitutive::new(p)?;
    println!("{:>8} {:>12} {:>12} {:>12}", "X", "v_hs", "d", "D");
    for x in [0.0, 1.0, 3.87, 5.0, 5.5, 7.5, 10.0, 15.0, 20.0, 29.0, 30.0] {
        println!("{x:>8.2} {:>12.4e} {:>12.4e} {:>12.4e}", cons.v_hs(x), cons.d(x), cons.big_d(x));
    }
    println!();
    println!("sup |v_hs'| = {:.4e} m^4/(kg s)", cons.v_hs_slope_sup());
    println!("sup d       = {:.4e} m^2/s", cons.d_sup());
    println!("D(x_hat)    = {:.4e} kg/(m s)", cons.big_d_max());

    // a softer network compresses more easily
    for alpha_comp in [0.02, 0.2, 2.0] {
        let c = Constitutive::new(SettlingParams { alpha_comp, ..p })?;
        println!("alpha_comp {alpha_comp:>5}: D(10) = {:.4e}", c.big_d(10.0));
    }
    Ok(())
}
