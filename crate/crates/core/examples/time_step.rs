//! The largest admissible step for the bundled reference cycle and how each
//! term of the bound scales with the grid.

use sbr_settling::cli::config::bundled;
use sbr_settling::constitutive::Constitutive;
use sbr_settling::scheme::{cfl_max_dt, CflInputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = bundled("reference_sbr")?;
    let model = base.build_model()?;
    let cons = Constitutive::new(base.settling)?;
    // each column is the step that term alone would allow (s)
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}  dominant", "N", "tau_max", "1/beta1", "1/beta2", "1/M_C(1+M3)", "1/M_S");
    for n in [25, 50, 100, 200, 400, 800] {
        let sc = base.with_cells(n);
        let geom = sc.build_geometry()?;
        let rep = cfl_max_dt(&CflInputs::new(&geom, &cons, &model, sc.q_norm(6, 6)))?;
        println!(
            "{n:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}  {}",
            rep.tau_max,
            1.0 / rep.beta1,
            1.0 / rep.beta2,
            1.0 / rep.particulate_reactions,
            1.0 / rep.soluble_reactions,
            rep.dominant
        );
    }
    Ok(())
}
