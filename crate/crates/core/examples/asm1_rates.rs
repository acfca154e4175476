//! Process rates and component increments of the modified ASM1 for a
//! typical mixed-liquor state, plus the bounds that enter the step limit.

use sbr_settling::constitutive::SettlingParams;
use sbr_settling::reactions::{Asm1Params, ReactionModel};

const PROCESSES: [&str; 8] = [
    "aerobic growth of heterotrophs",
    "anoxic growth of heterotrophs",
    "aerobic growth of autotrophs",
    "decay of heterotrophs",
    "decay of autotrophs",
    "ammonification",
    "hydrolysis of organics",
    "hydrolysis of organic nitrogen",
];

fn main() -> sbr_settling::Result<()> {
    let model = ReactionModel::asm1(&Asm1Params::default(), &SettlingParams::default())?;
    let c = [0.8889, 0.0295, 1.4503, 0.0904, 0.7371, 0.0025];
    let s = [0.04, 0.0026, 0.002, 0.0333, 0.0004, 0.0009];

    let mut r = vec![0.0; model.n_processes()];
    model.rate_vector(&c, &s, &mut r);
    println!("process rates (kg/(m^3 d)):");
    for (name, v) in PROCESSES.iter().zip(&r) {
        println!("  {name:<32} {:>12.4e}", v * 86_400.0);
    }

    let (mut rc, mut rs) = (vec![0.0; 6], vec![0.0; 6]);
    model.increments(&c, &s, &mut rc, &mut rs);
    println!("increments (kg/(m^3 d)):");
    for (name, v) in model.particulate_names().iter().zip(&rc).chain(model.soluble_names().iter().zip(&rs)) {
        println!("  {name:<6} {:>12.4e}", v * 86_400.0);
    }

    // without oxygen the heterotrophs switch to nitrate
    let mut anoxic = s;
    anoxic[2] = 0.0;
    model.rate_vector(&c, &anoxic, &mut r);
    println!("anoxic: aerobic growth {:.3e}, anoxic growth {:.3e} kg/(m^3 d)", r[0] * 86_400.0, r[1] * 86_400.0);

    let b = model.bounds();
    println!("bounds: M_C = {:.4e} 1/s, M_S = {:.4e} 1/s, M~ = {:.4e} kg/(m^3 s)", b.m_c, b.m_s, b.m_tilde);
    Ok(())
}
